#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace goosead {

inline constexpr double kStdFloor = 1e-8;

// Per-column z-score standardization. Degenerate columns keep their mean as
// the offset and use a unit divisor, so they scale to exactly zero on the
// training data.
struct Scaler {
  std::vector<double> means;
  std::vector<double> stds;
  std::vector<bool> degenerate;

  std::size_t width() const { return means.size(); }
  double divisor(std::size_t col) const { return degenerate[col] ? 1.0 : stds[col]; }

  bool operator==(const Scaler&) const = default;
};

// `data` is row-major with `cols` columns. Columns flagged in
// `force_degenerate` (if non-empty) are treated as degenerate regardless of
// their variance. Throws Error(kNumeric) "EmptyInput" when data is empty.
Scaler fit_scaler(std::span<const double> data, std::size_t cols,
                  const std::vector<bool>& force_degenerate = {});

std::vector<double> scale(const Scaler& s, std::span<const double> data);
std::vector<double> unscale(const Scaler& s, std::span<const double> data);

}  // namespace goosead
