#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mbotorus/torus_field.hpp"

namespace mbotorus::detail {

enum class Direction { forward, backward };

/// Unnormalized in-place complex transform over the grid's d axes.
/// forward uses exp(-2πi ...), backward exp(+2πi ...).
void fft_inplace(const GridSpec& grid, std::span<std::complex<double>> data, Direction dir);

/// Applies a real, even Fourier multiplier to real fields through
/// real-to-complex transforms. `multiplier` is indexed like a full spectrum.
class RealMultiplier {
 public:
  RealMultiplier(const GridSpec& grid, const std::vector<double>& multiplier);

  void apply(std::span<const double> in, std::span<double> out);

 private:
  GridSpec grid_;
  std::vector<double> half_;
  std::vector<double> real_;
  std::vector<std::complex<double>> spectrum_;
};

}  // namespace mbotorus::detail
