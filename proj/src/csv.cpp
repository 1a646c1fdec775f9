#include "latentpriv/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "latentpriv/errors.hpp"
#include "latentpriv/version.hpp"

namespace latentpriv {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

CsvWriter::CsvWriter(std::string path, std::vector<std::string> columns)
    : path_(std::move(path)), tmp_path_(path_ + ".tmp"),
      n_columns_(columns.size()) {
  if (columns.empty()) throw std::invalid_argument("CsvWriter: no columns");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i > 0) buffer_ += ',';
    buffer_ += columns[i];
  }
  buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
  if (open_) abort();
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (!open_) throw std::logic_error("CsvWriter: writer already closed");
  if (cells.size() != n_columns_)
    throw std::invalid_argument("CsvWriter: row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void CsvWriter::finish(std::uint64_t seed, const std::string& config_hash) {
  if (!open_) throw std::logic_error("CsvWriter: writer already closed");
  buffer_ += "# seed=" + std::to_string(seed) + " version=" LATENTPRIV_VERSION
             " config_hash=" + config_hash + "\n";
  {
    std::ofstream out(tmp_path_, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericalError("CsvWriter: cannot open " + tmp_path_);
    out << buffer_;
    if (!out) throw NumericalError("CsvWriter: write failed for " + tmp_path_);
  }
  if (std::rename(tmp_path_.c_str(), path_.c_str()) != 0)
    throw NumericalError("CsvWriter: rename failed for " + path_);
  open_ = false;
}

void CsvWriter::abort() {
  std::remove(tmp_path_.c_str());
  open_ = false;
}

}  // namespace latentpriv
