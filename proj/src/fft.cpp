#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace mbotorus::detail {
namespace {

// FFTW planning is not thread-safe; execution with new-array is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    for (auto& [key, plan] : real_plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const GridSpec& grid, Direction dir) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(grid.dim, grid.n, dir == Direction::forward);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::vector<int> dims(grid.dim, grid.n);
    const auto total = grid.size();
    auto* buf = fftw_alloc_complex(total);
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan =
        fftw_plan_dft(grid.dim, dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (plan == nullptr) throw std::runtime_error("fft: planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

  fftw_plan get_real(const GridSpec& grid, Direction dir) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(grid.dim, grid.n, dir == Direction::forward);
    if (auto it = real_plans_.find(key); it != real_plans_.end()) return it->second;

    std::vector<int> dims(grid.dim, grid.n);
    const auto half = grid.size() / grid.n * (grid.n / 2 + 1);
    auto* rbuf = fftw_alloc_real(grid.size());
    auto* cbuf = fftw_alloc_complex(half);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = dir == Direction::forward
                         ? fftw_plan_dft_r2c(grid.dim, dims.data(), rbuf, cbuf, flags)
                         : fftw_plan_dft_c2r(grid.dim, dims.data(), cbuf, rbuf, flags);
    fftw_free(rbuf);
    fftw_free(cbuf);
    if (plan == nullptr) throw std::runtime_error("fft: planning failed");
    real_plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, bool>, fftw_plan> plans_;
  std::map<std::tuple<int, int, bool>, fftw_plan> real_plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_inplace(const GridSpec& grid, std::span<std::complex<double>> data, Direction dir) {
  if (data.size() != grid.size()) throw std::invalid_argument("fft: size mismatch");
  fftw_plan plan = cache().get(grid, dir);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

RealMultiplier::RealMultiplier(const GridSpec& grid, const std::vector<double>& multiplier)
    : grid_(grid), real_(grid.size()) {
  if (multiplier.size() != grid.size()) throw std::invalid_argument("fft: multiplier size mismatch");
  const int n = grid.n;
  const int last = n / 2 + 1;
  const std::size_t rows = grid.size() / n;
  half_.resize(rows * last);
  spectrum_.resize(rows * last);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (std::size_t row = 0; row < rows; ++row) {
    for (int j = 0; j < last; ++j) half_[row * last + j] = multiplier[row * n + j] * scale;
  }
}

void RealMultiplier::apply(std::span<const double> in, std::span<double> out) {
  if (in.size() != grid_.size() || out.size() != grid_.size()) {
    throw std::invalid_argument("fft: size mismatch");
  }
  std::copy(in.begin(), in.end(), real_.begin());
  auto* spec = reinterpret_cast<fftw_complex*>(spectrum_.data());
  fftw_execute_dft_r2c(cache().get_real(grid_, Direction::forward), real_.data(), spec);
  for (std::size_t i = 0; i < half_.size(); ++i) spectrum_[i] *= half_[i];
  fftw_execute_dft_c2r(cache().get_real(grid_, Direction::backward), spec, out.data());
}

}  // namespace mbotorus::detail
