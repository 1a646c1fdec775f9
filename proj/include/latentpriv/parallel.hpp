#ifndef LATENTPRIV_PARALLEL_HPP
#define LATENTPRIV_PARALLEL_HPP

#include <cstdint>
#include <vector>

namespace latentpriv {

// Execution mode for the chunked kernels. Serial is the reference path;
// Parallel runs chunks under OpenMP when it is compiled in and falls back to
// the serial loop otherwise.
enum class ExecMode { Serial, Parallel };

constexpr std::int64_t kDefaultChunk = 8192;

// Splits [0, n) into fixed-size chunks, evaluates fn(chunk_index, begin, end)
// for each, and returns the per-chunk results in chunk order. Callers fold the
// partials sequentially, so floating-point summation order is independent of
// the execution mode and thread count: Serial and Parallel are bit-identical.
//
// fn must not throw; kernels report failures through their partial results.
template <typename Partial, typename ChunkFn>
std::vector<Partial> map_chunks(std::int64_t n, std::int64_t chunk_size,
                                ExecMode mode, ChunkFn&& fn) {
  const std::int64_t n_chunks =
      n <= 0 ? 0 : (n + chunk_size - 1) / chunk_size;
  std::vector<Partial> out(static_cast<std::size_t>(n_chunks));
#ifdef LATENTPRIV_HAVE_OPENMP
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < n_chunks; ++c) {
      const std::int64_t begin = c * chunk_size;
      const std::int64_t end = begin + chunk_size < n ? begin + chunk_size : n;
      out[static_cast<std::size_t>(c)] = fn(c, begin, end);
    }
    return out;
  }
#else
  (void)mode;
#endif
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    const std::int64_t begin = c * chunk_size;
    const std::int64_t end = begin + chunk_size < n ? begin + chunk_size : n;
    out[static_cast<std::size_t>(c)] = fn(c, begin, end);
  }
  return out;
}

// Accumulator for Monte-Carlo means with standard errors.
struct McPartial {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t count = 0;
  std::int64_t bad = 0;  // non-finite evaluations

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
};

struct McAccum {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t count = 0;
  std::int64_t bad = 0;

  void fold(const McPartial& p) {
    sum += p.sum;
    sum_sq += p.sum_sq;
    count += p.count;
    bad += p.bad;
  }
  double mean() const { return sum / static_cast<double>(count); }
  double std_error() const {
    if (count < 2) return 0.0;
    const double m = mean();
    double var = (sum_sq - static_cast<double>(count) * m * m) /
                 static_cast<double>(count - 1);
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / static_cast<double>(count));
  }
};

}  // namespace latentpriv

#endif  // LATENTPRIV_PARALLEL_HPP
