#include <doctest.h>

#include <cmath>

#include "goosead/error.hpp"
#include "goosead/evt.hpp"
#include "goosead/rng.hpp"

using namespace goosead;

namespace {

// Inverse-CDF GPD sampler.
std::vector<double> gpd_sample(Rng& rng, std::size_t n, double xi, double sigma) {
  std::vector<double> y(n);
  for (auto& v : y) {
    const double u = rng.uniform();
    v = xi == 0.0 ? -sigma * std::log1p(-u) : sigma / xi * (std::pow(1.0 - u, -xi) - 1.0);
  }
  return y;
}

}  // namespace

TEST_CASE("GPD fit recovers known parameters") {
  Rng rng(8);
  SUBCASE("xi 0.1, sigma 2") {
    const GpdFit f = fit_gpd(gpd_sample(rng, 100'000, 0.1, 2.0));
    CHECK(f.method == GpdMethod::kMaximumLikelihood);
    CHECK(std::fabs(f.xi - 0.1) < 0.03);
    CHECK(std::fabs(f.sigma - 2.0) < 0.1);
  }
  SUBCASE("exponential excesses") {
    const GpdFit f = fit_gpd(gpd_sample(rng, 100'000, 0.0, 1.0));
    CHECK(std::fabs(f.xi) < 0.03);
    CHECK(std::fabs(f.sigma - 1.0) < 0.05);
  }
  SUBCASE("bounded tail") {
    const GpdFit f = fit_gpd(gpd_sample(rng, 100'000, -0.2, 1.0));
    CHECK(std::fabs(f.xi + 0.2) < 0.03);
  }
}

TEST_CASE("profile scale maximizes the likelihood for fixed shape") {
  Rng rng(4);
  const auto y = gpd_sample(rng, 2000, 0.2, 1.5);
  for (double xi : {-0.3, 0.0, 0.2, 0.7}) {
    const double s = gpd_profile_sigma(y, xi);
    const double ll = gpd_log_likelihood(y, xi, s);
    CHECK(ll >= gpd_log_likelihood(y, xi, s * 1.01));
    CHECK(ll >= gpd_log_likelihood(y, xi, s * 0.99));
  }
}

TEST_CASE("log-likelihood outside the support") {
  const std::vector<double> y{1.0, 2.0, 5.0};
  CHECK(std::isinf(gpd_log_likelihood(y, -0.5, 2.0)));  // 1 + xi*y/sigma <= 0 at y = 5
  CHECK(std::isinf(gpd_log_likelihood(y, 0.1, -1.0)));
}

TEST_CASE("degenerate and small inputs") {
  const std::vector<double> equal(50, 0.25);
  const GpdFit f = fit_gpd(equal);
  CHECK(f.method == GpdMethod::kDegenerate);
  CHECK(f.sigma > 0.0);

  try {
    fit_gpd(std::vector<double>(29, 1.0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumeric);
    CHECK(std::string(e.what()).find("TooFewExceedances") != std::string::npos);
  }
}

TEST_CASE("threshold arithmetic") {
  // q n / n_u = e^-1 with xi = 0, sigma = 1, u = 10 -> 11
  const double q = std::exp(-1.0) * 100.0 / 1000.0;
  CHECK(pot_threshold(10.0, 0.0, 1.0, q, 1000, 100) == doctest::Approx(11.0).epsilon(1e-12));
  // ratio 1 -> z = u for any shape
  for (double xi : {-0.3, 0.0, 1e-7, 0.4}) CHECK(pot_threshold(3.0, xi, 2.0, 0.1, 1000, 100) == doctest::Approx(3.0));
  // closed form for xi != 0
  const double z = pot_threshold(1.0, 0.5, 2.0, 0.001, 1000, 50);
  CHECK(z == doctest::Approx(1.0 + 4.0 * (std::pow(0.02, -0.5) - 1.0)));
}

TEST_CASE("threshold is monotone in the risk level") {
  for (double xi : {-0.4, 0.0, 0.3}) {
    double prev = INFINITY;
    for (double q : {1e-5, 1e-4, 1e-3, 1e-2}) {
      const double z = pot_threshold(0.5, xi, 1.0, q, 10'000, 200);
      CHECK(z <= prev);
      prev = z;
    }
  }
}

TEST_CASE("empirical quantile") {
  CHECK(empirical_quantile({1, 2, 3, 4, 5}, 0.5) == 3.0);
  CHECK(empirical_quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(empirical_quantile({5, 1, 4, 2, 3}, 1.0) == 5.0);
  CHECK(empirical_quantile({5, 1, 4, 2, 3}, 0.0) == 1.0);
}

TEST_CASE("calibration controls the exceedance rate") {
  Rng rng(12);
  const auto train = gpd_sample(rng, 100'000, 0.1, 1.0);
  const EvtThreshold t = calibrate(train, 1e-3, 0.98, View::kTemp);
  CHECK(t.view == View::kTemp);
  CHECK(t.n == 100'000);
  CHECK(t.n_u == doctest::Approx(2000).epsilon(0.01));
  CHECK(t.z_star > t.u);
  const auto fresh = gpd_sample(rng, 1'000'000, 0.1, 1.0);
  std::size_t over = 0;
  for (double v : fresh) over += v > t.z_star;
  const double rate = static_cast<double>(over) / 1e6;
  CHECK(rate >= 0.5e-3);
  CHECK(rate <= 2e-3);

  CHECK_THROWS_AS(calibrate(std::vector<double>(1000, 1.0)), Error);  // nothing exceeds u
}
