#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "goosead/features.hpp"

namespace goosead {

inline constexpr std::size_t kMinExceedances = 30;
inline constexpr std::size_t kWarnExceedances = 100;
inline constexpr double kDefaultUQuantile = 0.98;
inline constexpr double kDefaultRisk = 1e-3;

enum class GpdMethod { kMaximumLikelihood, kMoments, kDegenerate };

struct GpdFit {
  double xi = 0.0;
  double sigma = 1.0;
  GpdMethod method = GpdMethod::kMaximumLikelihood;
};

// GPD log-likelihood of excesses y > 0; -inf outside the support.
double gpd_log_likelihood(std::span<const double> y, double xi, double sigma);

// Scale maximising the likelihood for a fixed shape.
double gpd_profile_sigma(std::span<const double> y, double xi);

// Maximum-likelihood GPD fit by a profile-likelihood search over xi in
// [-0.5, 1.0] (grid then golden-section refinement). Falls back to the method
// of moments when the maximum sits on the search boundary, and to an
// exponential fit when every excess is equal.
// Throws Error(kNumeric) "TooFewExceedances" below kMinExceedances values.
GpdFit fit_gpd(std::span<const double> excesses);

struct EvtThreshold {
  View view = View::kSeq;
  double u = 0.0;
  double xi = 0.0;
  double sigma = 1.0;
  std::size_t n = 0;
  std::size_t n_u = 0;
  double q = kDefaultRisk;
  double u_quantile = kDefaultUQuantile;
  double z_star = 0.0;

  bool operator==(const EvtThreshold&) const = default;
};

// Linear-interpolation empirical quantile (type 7) of unsorted data.
double empirical_quantile(std::vector<double> data, double p);

// Threshold at risk q from a fitted tail: z = u + (sigma/xi)[(q n/n_u)^-xi - 1],
// or its exponential limit u - sigma ln(q n/n_u) for |xi| <= 1e-6.
double pot_threshold(double u, double xi, double sigma, double q, std::size_t n, std::size_t n_u);

// Peaks-over-threshold calibration on normal-traffic errors.
EvtThreshold calibrate(std::span<const double> errors, double q = kDefaultRisk,
                       double u_quantile = kDefaultUQuantile, View view = View::kSeq);

}  // namespace goosead
