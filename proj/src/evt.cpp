#include "goosead/evt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "goosead/error.hpp"
#include "goosead/log.hpp"

namespace goosead {

namespace {

constexpr double kXiLo = -0.5;
constexpr double kXiHi = 1.0;
constexpr double kXiStep = 0.01;
constexpr double kXiZero = 1e-9;

double score_sum(std::span<const double> y, double xi, double sigma) {
  double s = 0.0;
  for (double v : y) s += v / (sigma + xi * v);
  return s;
}

double profile_ll(std::span<const double> y, double xi) {
  return gpd_log_likelihood(y, xi, gpd_profile_sigma(y, xi));
}

GpdFit moments_fit(std::span<const double> y) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(y.size() - 1);

  GpdFit fit;
  if (!(var > 1e-24 * mean * mean)) {
    fit.xi = 0.0;
    fit.sigma = std::max(mean, std::numeric_limits<double>::min());
    fit.method = GpdMethod::kDegenerate;
    log::warn("GPD fit: excesses have zero variance; using a degenerate exponential tail");
    return fit;
  }
  const double r = mean * mean / var;
  fit.xi = std::clamp(0.5 * (1.0 - r), kXiLo, kXiHi);
  fit.sigma = 0.5 * mean * (r + 1.0);
  fit.method = GpdMethod::kMoments;
  return fit;
}

}  // namespace

double gpd_log_likelihood(std::span<const double> y, double xi, double sigma) {
  if (!(sigma > 0.0)) return -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(y.size());
  double ll = -n * std::log(sigma);
  if (std::abs(xi) < kXiZero) {
    for (double v : y) ll -= v / sigma;
    return ll;
  }
  double acc = 0.0;
  for (double v : y) {
    const double t = 1.0 + xi * v / sigma;
    if (!(t > 0.0)) return -std::numeric_limits<double>::infinity();
    acc += std::log1p(xi * v / sigma);
  }
  return ll - (1.0 + 1.0 / xi) * acc;
}

double gpd_profile_sigma(std::span<const double> y, double xi) {
  // Stationarity in sigma: sum y/(sigma + xi y) = n/(1 + xi). The left side
  // decreases in sigma, so the root is bracketed and found by safeguarded
  // Newton iteration on log(sigma).
  const double n = static_cast<double>(y.size());
  const double target = n / (1.0 + xi);
  const double y_max = *std::max_element(y.begin(), y.end());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;
  if (std::abs(xi) < kXiZero) return mean;

  double lo = xi < 0.0 ? -xi * y_max : 0.0;  // support bound (exclusive)
  double hi = std::max(mean, lo) * 2.0 + 1e-300;
  while (score_sum(y, xi, hi) > target) hi *= 2.0;
  double s = std::max(0.5 * (lo + hi), std::min(hi, mean * (1.0 + std::max(xi, 0.0))));
  if (s <= lo) s = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double f = 0.0, df = 0.0;
    for (double v : y) {
      const double d = s + xi * v;
      f += v / d;
      df -= v / (d * d);
    }
    f -= target;
    if (f > 0.0) lo = s; else hi = s;
    double next = s - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-13 * s) return next;
    s = next;
  }
  return s;
}

GpdFit fit_gpd(std::span<const double> excesses) {
  if (excesses.size() < kMinExceedances) {
    throw Error(ErrorKind::kNumeric, "TooFewExceedances: " + std::to_string(excesses.size()) +
                                         " excesses, need at least " +
                                         std::to_string(kMinExceedances));
  }
  if (excesses.size() < kWarnExceedances) {
    log::warn("GPD fit on only " + std::to_string(excesses.size()) + " excesses");
  }
  for (double v : excesses) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::kNumeric, "GPD excesses must be positive and finite");
    }
  }
  const auto [mn, mx] = std::minmax_element(excesses.begin(), excesses.end());
  if (*mx - *mn <= 1e-12 * *mx) return moments_fit(excesses);

  const int steps = static_cast<int>(std::lround((kXiHi - kXiLo) / kXiStep));
  int best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    const double ll = profile_ll(excesses, kXiLo + i * kXiStep);
    if (ll > best_ll) {
      best_ll = ll;
      best = i;
    }
  }
  if (best == 0 || best == steps || !std::isfinite(best_ll)) return moments_fit(excesses);

  // Golden-section refinement inside the bracketing grid cell pair.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = kXiLo + (best - 1) * kXiStep;
  double b = kXiLo + (best + 1) * kXiStep;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = profile_ll(excesses, c), fd = profile_ll(excesses, d);
  while (b - a > 1e-7) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - phi * (b - a);
      fc = profile_ll(excesses, c);
    } else {
      a = c; c = d; fc = fd;
      d = a + phi * (b - a);
      fd = profile_ll(excesses, d);
    }
  }
  GpdFit fit;
  fit.xi = 0.5 * (a + b);
  fit.sigma = gpd_profile_sigma(excesses, fit.xi);
  fit.method = GpdMethod::kMaximumLikelihood;
  return fit;
}

double empirical_quantile(std::vector<double> data, double p) {
  if (data.empty()) throw Error(ErrorKind::kNumeric, "EmptyInput: quantile of no data");
  std::sort(data.begin(), data.end());
  const double h = (static_cast<double>(data.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, data.size() - 1);
  return data[lo] + (h - static_cast<double>(lo)) * (data[hi] - data[lo]);
}

double pot_threshold(double u, double xi, double sigma, double q, std::size_t n, std::size_t n_u) {
  const double r = q * static_cast<double>(n) / static_cast<double>(n_u);
  if (std::abs(xi) > 1e-6) return u + (sigma / xi) * (std::pow(r, -xi) - 1.0);
  return u - sigma * std::log(r);
}

EvtThreshold calibrate(std::span<const double> errors, double q, double u_quantile, View view) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::kConfig, "risk q must lie in (0, 1)");
  if (!(u_quantile > 0.0 && u_quantile < 1.0)) {
    throw Error(ErrorKind::kConfig, "u quantile must lie in (0, 1)");
  }
  for (double e : errors) {
    if (!std::isfinite(e)) throw Error(ErrorKind::kNumeric, "non-finite calibration error");
  }
  EvtThreshold t;
  t.view = view;
  t.q = q;
  t.u_quantile = u_quantile;
  t.n = errors.size();
  t.u = empirical_quantile({errors.begin(), errors.end()}, u_quantile);
  std::vector<double> excesses;
  for (double e : errors) {
    if (e > t.u) excesses.push_back(e - t.u);
  }
  t.n_u = excesses.size();
  if (t.n_u < kMinExceedances) {
    throw Error(ErrorKind::kNumeric,
                "TooFewExceedances: " + std::to_string(t.n_u) + " of " + std::to_string(t.n) +
                    " calibration errors exceed the " + std::to_string(u_quantile) +
                    " quantile; need at least " + std::to_string(kMinExceedances));
  }
  const GpdFit fit = fit_gpd(excesses);
  t.xi = fit.xi;
  t.sigma = fit.sigma;
  t.z_star = pot_threshold(t.u, t.xi, t.sigma, q, t.n, t.n_u);
  if (t.z_star < t.u) {
    log::warn("risk q exceeds the exceedance fraction; threshold clamped to u");
    t.z_star = t.u;
  }
  return t;
}

}  // namespace goosead
