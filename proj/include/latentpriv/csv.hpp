#ifndef LATENTPRIV_CSV_HPP
#define LATENTPRIV_CSV_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace latentpriv {

// Deterministic formatting used everywhere a double reaches an output file,
// so identical runs produce byte-identical CSVs.
std::string fmt_double(double v);

std::uint64_t fnv1a64(const std::string& s);

// RFC-4180-style CSV writer: comma separators, LF line endings, '.' decimal.
// Content goes to <path>.tmp and is renamed into place by finish(); abort()
// (or destruction without finish) removes the partial file. finish() appends
// a provenance footer line "# seed=... version=... config_hash=...".
class CsvWriter {
 public:
  CsvWriter(std::string path, std::vector<std::string> columns);
  ~CsvWriter();

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void add_row(const std::vector<std::string>& cells);
  void finish(std::uint64_t seed, const std::string& config_hash);
  void abort();

 private:
  std::string path_;
  std::string tmp_path_;
  std::string buffer_;
  std::size_t n_columns_;
  bool open_ = true;
};

}  // namespace latentpriv

#endif  // LATENTPRIV_CSV_HPP
