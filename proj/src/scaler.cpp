#include "goosead/scaler.hpp"

#include <algorithm>
#include <cmath>

#include "goosead/error.hpp"
#include "goosead/features.hpp"

namespace goosead {

Scaler fit_scaler(std::span<const double> data, std::size_t cols,
                  const std::vector<bool>& force_degenerate) {
  if (cols == 0 || data.empty() || data.size() % cols != 0) {
    throw Error(ErrorKind::kNumeric, "EmptyInput: cannot fit a scaler on no rows");
  }
  if (!force_degenerate.empty() && force_degenerate.size() != cols) {
    throw Error(ErrorKind::kSchema, "degenerate flag count does not match column count");
  }
  const std::size_t n = data.size() / cols;
  Scaler s;
  s.means.assign(cols, 0.0);
  s.stds.assign(cols, 0.0);
  s.degenerate.assign(cols, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cols; ++c) s.means[c] += data[i * cols + c];
  }
  for (auto& m : s.means) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double d = data[i * cols + c] - s.means[c];
      s.stds[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    const double var = s.stds[c] / static_cast<double>(n);
    s.stds[c] = std::max(std::sqrt(var), kStdFloor);
    s.degenerate[c] = var < kDegenerateVariance || (!force_degenerate.empty() && force_degenerate[c]);
  }
  return s;
}

std::vector<double> scale(const Scaler& s, std::span<const double> data) {
  const std::size_t cols = s.width();
  if (cols == 0 || data.size() % cols != 0) {
    throw Error(ErrorKind::kSchema, "DimensionMismatch: data width does not match scaler");
  }
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t c = i % cols;
    out[i] = (data[i] - s.means[c]) / s.divisor(c);
  }
  return out;
}

std::vector<double> unscale(const Scaler& s, std::span<const double> data) {
  const std::size_t cols = s.width();
  if (cols == 0 || data.size() % cols != 0) {
    throw Error(ErrorKind::kSchema, "DimensionMismatch: data width does not match scaler");
  }
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t c = i % cols;
    out[i] = data[i] * s.divisor(c) + s.means[c];
  }
  return out;
}

}  // namespace goosead
