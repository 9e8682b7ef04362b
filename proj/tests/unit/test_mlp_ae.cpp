#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "goosead/autoencoder.hpp"
#include "goosead/error.hpp"
#include "goosead/evt.hpp"
#include "goosead/synth.hpp"
#include "support.hpp"

using namespace goosead;

namespace {

// Naive reference forward pass: explicit loops over the weight matrices.
std::vector<double> naive_forward(const AeModel& m, std::vector<double> a) {
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto& L = m.layers[l];
    std::vector<double> z(L.out);
    for (std::size_t o = 0; o < L.out; ++o) {
      long double acc = L.bias[o];
      for (std::size_t i = 0; i < L.in; ++i) acc += static_cast<long double>(L.weights[o * L.in + i]) * a[i];
      const bool last = l + 1 == m.layers.size();
      z[o] = last || m.activation == Activation::kIdentity ? static_cast<double>(acc)
                                                           : std::tanh(static_cast<double>(acc));
    }
    a = std::move(z);
  }
  return a;
}

void randomize_biases(AeModel& m, Rng& rng) {
  for (auto& l : m.layers) {
    for (auto& b : l.bias) b = rng.uniform(-0.5, 0.5);
  }
}

std::vector<double> normal_temp_rows(double span_s, std::uint64_t seed, std::vector<bool>* degenerate = nullptr) {
  PublisherSpec a;
  a.go_id = "A";
  a.src_mac = {0, 0, 0, 0, 0, 1};
  a.t_max_ms = 100;
  a.event_rate = 1.0;
  a.seed = seed;
  PublisherSpec b = a;
  b.go_id = "B";
  b.src_mac = {0, 0, 0, 0, 0, 2};
  b.event_rate = 2.0;
  b.seed = seed + 1;
  const FeatureMatrix m =
      assemble(extract_all(build_windows(gen_normal({a, b}, span_s, 100.0), {0.5, 0.5})), Scope::kTrain);
  if (degenerate) degenerate->assign(m.degenerate.begin() + kTempOffset, m.degenerate.begin() + kTempOffset + kNumTemp);
  return m.view_slice(View::kTemp);
}

}  // namespace

TEST_CASE("scaler arithmetic") {
  const std::vector<double> col{2, 4, 6};
  const Scaler s = fit_scaler(col, 1);
  const auto z = scale(s, col);
  CHECK(z[0] == doctest::Approx(-1.224744871).epsilon(1e-9));
  CHECK(z[1] == doctest::Approx(0.0));
  CHECK(z[2] == doctest::Approx(1.224744871).epsilon(1e-9));
  const auto back = unscale(s, z);
  for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(col[i]));

  const std::vector<double> constant{3, 3, 3, 3};
  const Scaler c = fit_scaler(constant, 1);
  CHECK(c.degenerate[0]);
  for (double v : scale(c, constant)) CHECK(v == 0.0);

  CHECK_THROWS_AS(fit_scaler(std::vector<double>{}, 2), Error);
  const Scaler two = fit_scaler(std::vector<double>{1, 2, 3, 4}, 2);
  CHECK_THROWS_AS(scale(two, std::vector<double>{1, 2, 3}), Error);
}

TEST_CASE("scaled training columns are standardized") {
  Rng rng(1);
  std::vector<double> data;
  for (int i = 0; i < 1000; ++i) {
    data.push_back(rng.uniform(-5, 20));
    data.push_back(rng.exponential(0.1));
    data.push_back(7.0);
  }
  const Scaler s = fit_scaler(data, 3);
  const auto z = scale(s, data);
  for (std::size_t c = 0; c < 2; ++c) {
    double mean = 0, var = 0;
    for (std::size_t i = c; i < z.size(); i += 3) mean += z[i];
    mean /= 1000;
    for (std::size_t i = c; i < z.size(); i += 3) var += (z[i] - mean) * (z[i] - mean);
    CHECK(std::fabs(mean) < 1e-6);
    CHECK(std::fabs(std::sqrt(var / 1000) - 1.0) < 1e-6);
  }
  CHECK(s.degenerate[2]);
}

TEST_CASE("forward pass") {
  SUBCASE("zero parameters give a zero reconstruction") {
    AeModel m = make_model(View::kTemp, default_dims(View::kTemp), Activation::kTanh, 1);
    for (auto& l : m.layers) {
      std::fill(l.weights.begin(), l.weights.end(), 0.0);
      std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
    const std::vector<double> x{1, -2, 3, 0.5, 9, -1, 2, 4};
    for (double v : forward(m, x).output) CHECK(v == 0.0);
  }
  SUBCASE("identity linear pair reproduces its input") {
    AeModel m = make_model(View::kSeq, {6, 6, 6}, Activation::kIdentity, 1);
    for (auto& l : m.layers) {
      std::fill(l.weights.begin(), l.weights.end(), 0.0);
      for (std::size_t i = 0; i < 6; ++i) l.weights[i * 6 + i] = 1.0;
    }
    const std::vector<double> x{1, -2, 3, 0.5, 9, -1};
    CHECK(forward(m, x).output == x);
  }
  SUBCASE("matches a naive implementation") {
    Rng rng(11);
    for (View v : {View::kSeq, View::kTemp}) {
      AeModel m = make_model(v, default_dims(v), Activation::kTanh, 3);
      randomize_biases(m, rng);
      for (int t = 0; t < 50; ++t) {
        std::vector<double> x(m.input_width());
        for (auto& e : x) e = rng.uniform(-3, 3);
        const auto fw = forward(m, x);
        const auto ref = naive_forward(m, x);
        for (std::size_t j = 0; j < x.size(); ++j) CHECK(std::fabs(fw.output[j] - ref[j]) < 1e-10);
        CHECK(fw.latent.size() == m.latent_width());
      }
    }
  }
  SUBCASE("wrong width") {
    const AeModel m = make_model(View::kSeq, default_dims(View::kSeq), Activation::kTanh, 1);
    CHECK_THROWS_AS(forward(m, std::vector<double>(5)), Error);
  }
}

TEST_CASE("reconstruction error") {
  CHECK(mse(std::vector<double>{0, 0}, std::vector<double>{1, 1}) == 1.0);
  const std::vector<double> x{0.3, -1, 2};
  CHECK(mse(x, x) == 0.0);
}

TEST_CASE("dims validation and defaults") {
  CHECK(default_dims(View::kSeq) == std::vector<std::size_t>{6, 16, 8, 3, 8, 16, 6});
  CHECK(default_dims(View::kTemp) == std::vector<std::size_t>{8, 8, 2, 8, 8});
  CHECK_THROWS_AS(validate_dims({6, 3}), Error);
  CHECK_THROWS_AS(validate_dims({6, 3, 5}), Error);
  CHECK_THROWS_AS(validate_dims({6, 0, 6}), Error);
  CHECK_NOTHROW(validate_dims({6, 3, 6}));
  const AeModel m = make_model(View::kTemp, default_dims(View::kTemp), Activation::kTanh, 1);
  CHECK(m.latent_width() == 2);
  CHECK(m.parameter_count() == (8 * 8 + 8) + (8 * 2 + 2) + (2 * 8 + 8) + (8 * 8 + 8));
}

TEST_CASE("analytic gradients match finite differences") {
  Rng rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    for (View v : {View::kSeq, View::kTemp}) {
      AeModel m = make_model(v, default_dims(v), Activation::kTanh, 100 + trial);
      randomize_biases(m, rng);
      std::vector<double> data(8 * m.input_width());
      for (auto& e : data) e = rng.uniform(-2, 2);
      const std::vector<std::size_t> rows{0, 1, 2, 3, 4, 5, 6, 7};
      CHECK(goosead::testing::max_gradient_error(m, data, rows) < 1e-4);
    }
  }
}

TEST_CASE("memorizes a single repeated vector") {
  std::vector<double> data;
  const std::vector<double> x{1.5, 0.0, 3.0, 10.0, 0.01, 0.02, 120.0, 200.0};
  for (int i = 0; i < 500; ++i) data.insert(data.end(), x.begin(), x.end());
  TrainConfig cfg;
  cfg.dims = default_dims(View::kTemp);
  const TrainResult r = train(View::kTemp, data, cfg);
  CHECK(r.model.train_meta.final_loss < 1e-4);
}

TEST_CASE("training is deterministic and improves") {
  std::vector<bool> degenerate;
  const auto data = normal_temp_rows(120.0, 5, &degenerate);
  TrainConfig cfg;
  cfg.dims = default_dims(View::kTemp);
  cfg.seed = 42;
  const TrainResult a = train(View::kTemp, data, cfg, degenerate);
  const TrainResult b = train(View::kTemp, data, cfg, degenerate);
  CHECK(a.model == b.model);
  CHECK(a.train_loss == b.train_loss);
  REQUIRE(a.train_loss.size() >= 50);
  CHECK(a.train_loss[49] < a.train_loss[0]);
  CHECK(a.model.train_meta.epochs == a.train_loss.size());

  cfg.seed = 43;
  const TrainResult c = train(View::kTemp, data, cfg, degenerate);
  CHECK_FALSE(c.model == a.model);
}

TEST_CASE("errors of trained models") {
  std::vector<bool> degenerate;
  const auto data = normal_temp_rows(300.0, 9, &degenerate);
  TrainConfig cfg;
  cfg.dims = default_dims(View::kTemp);
  const AeModel m = train(View::kTemp, data, cfg, degenerate).model;
  const std::vector<double> errors = reconstruction_errors(m, data);

  SUBCASE("median training error lies below the POT threshold quantile") {
    CHECK(empirical_quantile(errors, 0.5) < empirical_quantile(errors, kDefaultUQuantile));
  }
  SUBCASE("row at the column means scales to the zero vector") {
    const std::vector<double> zero(kNumTemp, 0.0);
    const double expect = mse(zero, forward(m, zero).output);
    const double got = reconstruction_errors(m, m.scaler.means)[0];
    CHECK(got == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("narrow bottleneck cannot reproduce a flood") {
    std::vector<double> sorted = errors;
    const double p99 = empirical_quantile(sorted, 0.99);
    double max_count = 0;
    for (std::size_t i = 3; i < data.size(); i += kNumTemp) max_count = std::max(max_count, data[i]);
    std::vector<double> flood(data.begin(), data.begin() + kNumTemp);
    flood[3] = 50.0 * max_count;
    CHECK(reconstruction_errors(m, flood)[0] >= 10.0 * p99);
  }
  SUBCASE("latent codes") {
    const auto z = latent(m, data);
    CHECK(z.size() == data.size() / kNumTemp * 2);
  }
}

TEST_CASE("flooded windows reconstruct far worse than normal ones") {
  std::vector<bool> degenerate;
  const auto train_rows = normal_temp_rows(300.0, 21, &degenerate);
  TrainConfig cfg;
  cfg.dims = default_dims(View::kTemp);
  const AeModel m = train(View::kTemp, train_rows, cfg, degenerate).model;

  PublisherSpec a;
  a.go_id = "A";
  a.src_mac = {0, 0, 0, 0, 0, 1};
  a.t_max_ms = 100;
  a.event_rate = 1.0;
  a.seed = 77;
  PublisherSpec b = a;
  b.go_id = "B";
  b.src_mac = {0, 0, 0, 0, 0, 2};
  b.event_rate = 2.0;
  b.seed = 78;
  AttackSpec dos;
  dos.kind = Label::kDoS;
  dos.start_s = 60.0;
  dos.duration_s = 20.0;
  dos.seed = 3;
  std::vector<AttackInterval> labels;
  const auto frames = inject_dos(gen_normal({a, b}, 120.0, 100.0), dos, 100.0, labels);
  auto windows = build_windows(frames, {0.5, 0.5});
  label_windows(windows, labels);
  const FeatureMatrix x = assemble(extract_all(windows), Scope::kInfer);
  const auto errors = reconstruction_errors(m, x.view_slice(View::kTemp));
  // Labels are time-based, so only the flood's own flow carries DoS traffic.
  std::vector<double> attack, normal;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.meta[i].label == Label::kNormal) normal.push_back(errors[i]);
    if (x.meta[i].label == Label::kDoS && x.meta[i].flow.src_mac == dos.attacker_mac) attack.push_back(errors[i]);
  }
  REQUIRE(attack.size() >= 40);
  REQUIRE(normal.size() >= 100);
  CHECK(empirical_quantile(attack, 0.5) > 5.0 * empirical_quantile(normal, 0.5));
}
