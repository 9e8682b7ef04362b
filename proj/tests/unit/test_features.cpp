#include <doctest.h>

#include <cmath>

#include "goosead/features.hpp"
#include "goosead/synth.hpp"
#include "support.hpp"

using namespace goosead;

namespace {

GooseFrame frame(double t, std::uint32_t st, std::uint32_t sq) {
  GooseFrame f;
  f.ts = from_seconds(t);
  f.go_id = "A";
  f.src_mac = {0, 0, 0, 0, 0, 1};
  f.dst_mac = {0x01, 0x0C, 0xCD, 0x01, 0x00, 0x01};
  f.st_num = st;
  f.sq_num = sq;
  f.frame_len = 120;
  f.ttl_ms = 2000;
  return f;
}

std::size_t col(const char* name) { return feature_index(name); }

}  // namespace

TEST_CASE("registry order and views") {
  CHECK(kFeatureColumns.size() == 14);
  CHECK(col("dt_mean") == 0);
  CHECK(col("ttl_mean") == 7);
  CHECK(col("st_changes") == 8);
  CHECK(col("bad_dst_rate") == 13);
  CHECK(col("nope") == kNumFeatures);
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    CHECK((i >= view_offset(kFeatureColumns[i].view) &&
           i < view_offset(kFeatureColumns[i].view) + view_width(kFeatureColumns[i].view)));
  }
}

TEST_CASE("temporal features of a regular window") {
  const auto w = build_windows({frame(0, 1, 0), frame(1, 1, 1), frame(2, 1, 2), frame(3, 1, 3)}, {10.0, 10.0});
  REQUIRE(w.size() == 1);
  const TempVector t = extract_temporal(w[0]);
  CHECK(t[0] == doctest::Approx(1.0));
  CHECK(t[1] == doctest::Approx(0.0));
  CHECK(t[2] == doctest::Approx(1.0));
  CHECK(t[3] == 4);
  CHECK(t[6] == 120);
  CHECK(t[7] == 2000);
}

TEST_CASE("empty window") {
  const auto w = build_windows({frame(0, 1, 0), frame(3, 1, 1)}, {1.0, 1.0});
  REQUIRE(w.size() == 4);
  const FeatureRow r = extract_features(w[1]);
  CHECK(r[3] == 0);
  for (std::size_t c : {0, 1, 2, 4, 5, 6, 7}) CHECK(std::isnan(r[c]));
  for (std::size_t c = 8; c < 13; ++c) CHECK(r[c] == 0);
  CHECK(std::isnan(r[13]));
}

TEST_CASE("sequence counters") {
  SUBCASE("steady retransmissions") {
    const auto w = build_windows({frame(0, 5, 10), frame(0.1, 5, 11), frame(0.2, 5, 12), frame(0.3, 5, 13)},
                                 {1.0, 1.0});
    const SeqVector s = extract_sequence(w[0]);
    CHECK(s == SeqVector{0, 0, 0, 3, 0, 0});
  }
  SUBCASE("reset riding a state change") {
    const auto w = build_windows({frame(0, 1, 7), frame(0.1, 1, 8), frame(0.2, 2, 0), frame(0.3, 2, 1)},
                                 {1.0, 1.0});
    const SeqVector s = extract_sequence(w[0]);
    CHECK(s[0] == 1);
    CHECK(s[1] == 0);
    CHECK(s[2] == 0);
    CHECK(s[3] == 8);
    CHECK(s[4] == 1);
  }
  SUBCASE("reset and jump without a state change") {
    const auto w = build_windows({frame(0, 1, 7), frame(0.1, 1, 3), frame(0.2, 1, 9), frame(0.3, 105, 0)},
                                 {1.0, 1.0});
    const SeqVector s = extract_sequence(w[0]);
    CHECK(s[1] == 1);
    CHECK(s[2] == 1);
    CHECK(s[4] == 104);
  }
  SUBCASE("unicast destinations") {
    auto a = frame(0, 1, 0), b = frame(0.1, 1, 1);
    b.dst_mac[0] = 0x00;
    const auto w = build_windows({a, b}, {1.0, 1.0});
    CHECK(extract_sequence(w[0])[5] == doctest::Approx(0.5));
  }
  SUBCASE("pair with the seed frame counts in the later window") {
    const auto w = build_windows({frame(0.5, 1, 0), frame(1.5, 1, 5)}, {1.0, 1.0});
    REQUIRE(w.size() == 2);
    CHECK(extract_sequence(w[1])[2] == 1);
    CHECK(extract_sequence(w[1])[3] == 0);
  }
}

TEST_CASE("every feature matches the brute-force oracle") {
  Rng rng(5);
  std::size_t windows = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto flow = goosead::testing::random_flow(rng, 50, 1'000'000);
    const double tw = 0.1 * static_cast<double>(1 + rng.below(15));
    for (const auto& w : build_windows(flow, {tw, tw})) {
      const FeatureRow got = extract_features(w);
      const FeatureRow want = goosead::testing::oracle_features(flow, w.t_start, w.t_w);
      for (std::size_t c = 0; c < kNumFeatures; ++c) {
        INFO("feature ", kFeatureColumns[c].name, " window ", w.t_start);
        CHECK(goosead::testing::feature_close(got[c], want[c]));
      }
      ++windows;
    }
  }
  CHECK(windows > 200);
}

TEST_CASE("Poisson arrivals have mean gap near 1/rate") {
  Rng rng(17);
  std::vector<GooseFrame> frames;
  double t = 0.0;
  std::uint32_t sq = 0;
  while (t < 1000.0) {
    frames.push_back(frame(t, 1, sq++));
    t += rng.exponential(10.0);
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& w : build_windows(frames, {1.0, 1.0})) {
    const double dt = extract_temporal(w)[0];
    if (!std::isnan(dt)) {
      sum += dt;
      ++n;
    }
  }
  REQUIRE(n >= 990);
  CHECK(std::fabs(sum / static_cast<double>(n) - 0.1) < 0.05);
}

TEST_CASE("assemble interpolates, zero-fills and flags") {
  FeatureMatrix raw;
  const FlowKey k{"A", {0, 0, 0, 0, 0, 1}};
  for (int i = 0; i < 3; ++i) {
    raw.meta.push_back({k, from_seconds(2 - i), from_seconds(1.0), Label::kNormal});  // reverse order
    FeatureRow r{};
    r[13] = 0.0;
    raw.rows.push_back(r);
  }
  // rows are given in reverse time order: t=2, 1, 0
  raw.rows[0][0] = 3.0;
  raw.rows[1][0] = kMissing;
  raw.rows[1][13] = kMissing;
  raw.rows[2][0] = 1.0;
  raw.rows[0][6] = 5.0;
  raw.rows[1][6] = 5.0;
  raw.rows[2][6] = kMissing;
  FeatureRow gone;
  gone.fill(kMissing);
  raw.meta.push_back({k, from_seconds(3.0), from_seconds(1.0), Label::kNormal});
  raw.rows.push_back(gone);

  const FeatureMatrix m = assemble(raw, Scope::kTrain);
  REQUIRE(m.size() == 3);
  CHECK(m.meta[0].t_start == 0);
  CHECK(m.rows[0][0] == 1.0);
  CHECK(m.rows[1][0] == 2.0);
  CHECK(m.rows[2][0] == 3.0);
  CHECK(m.rows[0][6] == 5.0);  // edge fill
  CHECK(m.rows[1][13] == 0.0);
  CHECK(m.degenerate[6]);   // constant column
  CHECK(m.degenerate[13]);
  CHECK_FALSE(m.degenerate[0]);
  for (const auto& r : m.rows) {
    for (double v : r) CHECK(std::isfinite(v));
  }

  const FeatureMatrix inf = assemble(raw, Scope::kInfer);
  CHECK_FALSE(inf.degenerate[6]);
}

TEST_CASE("synthetic normal capture assembles to a finite matrix") {
  PublisherSpec a;
  a.go_id = "A";
  a.src_mac = {0, 0, 0, 0, 0, 1};
  a.t_max_ms = 100;
  a.event_rate = 0.5;
  a.seed = 1;
  PublisherSpec b = a;
  b.go_id = "B";
  b.src_mac = {0, 0, 0, 0, 0, 2};
  b.seed = 2;
  const auto frames = gen_normal({a, b}, 60.0, 1000.0);
  const auto windows = build_windows(frames, {1.0, 1.0});
  const FeatureMatrix m = assemble(extract_all(windows), Scope::kTrain);
  CHECK(m.size() == windows.size());
  for (const auto& r : m.rows) {
    for (double v : r) CHECK(std::isfinite(v));
    CHECK(r[col("sq_resets")] == 0);
    CHECK(r[col("sq_bigjump")] == 0);
    CHECK(r[col("bad_dst_rate")] == 0);
  }
}
