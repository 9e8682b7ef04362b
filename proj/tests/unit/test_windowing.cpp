#include <doctest.h>

#include <map>

#include "goosead/error.hpp"
#include "goosead/windowing.hpp"
#include "support.hpp"

using namespace goosead;

namespace {

GooseFrame at(double t, const std::string& id = "A", std::uint8_t mac_tail = 1) {
  GooseFrame f;
  f.ts = from_seconds(t);
  f.go_id = id;
  f.gocb_ref = id + "/LLN0$GO$gcb";
  f.src_mac = {0, 0, 0, 0, 0, mac_tail};
  f.dst_mac = {0x01, 0x0C, 0xCD, 0x01, 0x00, 0x01};
  return f;
}

}  // namespace

TEST_CASE("four frames, four windows with cross-window gaps") {
  const std::vector<GooseFrame> frames{at(0.0), at(1.0), at(2.0), at(3.9)};
  const auto w = build_windows(frames, {1.0, 1.0});
  REQUIRE(w.size() == 4);
  for (const auto& x : w) CHECK(x.frames.size() == 1);
  CHECK(w[0].dt_series.empty());
  CHECK(!w[0].seed);
  REQUIRE(w[1].dt_series.size() == 1);
  CHECK(w[1].dt_series[0] == doctest::Approx(1.0));
  CHECK(w[2].dt_series[0] == doctest::Approx(1.0));
  CHECK(w[3].dt_series[0] == doctest::Approx(1.9));
  CHECK(w[3].seed->ts == from_seconds(2.0));
}

TEST_CASE("flows never mix") {
  std::vector<GooseFrame> frames;
  for (int i = 0; i < 10; ++i) {
    frames.push_back(at(i * 0.25, "A"));
    frames.push_back(at(i * 0.25 + 0.1, "B"));
  }
  frames.push_back(at(0.3, "A", 9));  // same goID, different publisher MAC
  std::sort(frames.begin(), frames.end(), [](auto& a, auto& b) { return a.ts < b.ts; });
  const auto w = build_windows(frames, {1.0, 1.0});
  std::map<std::string, std::size_t> per_flow;
  for (const auto& x : w) {
    for (const auto& f : x.frames) CHECK(FlowKey::of(f) == x.key);
    per_flow[x.key.to_string()] += x.frames.size();
  }
  CHECK(per_flow.size() == 3);
  CHECK(per_flow["A@00:00:00:00:00:01"] == 10);
  CHECK(per_flow["B@00:00:00:00:00:01"] == 10);
  CHECK(per_flow["A@00:00:00:00:00:09"] == 1);
}

TEST_CASE("gocbRef identifies flows without goID") {
  GooseFrame f = at(0.0);
  f.go_id.clear();
  const auto w = build_windows({f}, {1.0, 1.0});
  REQUIRE(w.size() == 1);
  CHECK(w[0].key.goose_id == "A/LLN0$GO$gcb");
}

TEST_CASE("interior empty windows are emitted") {
  const auto w = build_windows({at(0.0), at(5.0)}, {1.0, 1.0});
  REQUIRE(w.size() == 6);
  for (int k = 1; k <= 4; ++k) {
    CHECK(w[k].t_start == from_seconds(k));
    CHECK(w[k].frames.empty());
    CHECK(w[k].seed->ts == 0);
  }
  CHECK(w[5].dt_series.size() == 1);
  CHECK(w[5].dt_series[0] == doctest::Approx(5.0));
}

TEST_CASE("bucketing matches a brute-force oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto flow = goosead::testing::random_flow(rng, 1 + rng.below(80), static_cast<TimestampUs>(rng.below(10'000'000)));
    const double tw = 0.05 * static_cast<double>(1 + rng.below(40));
    const double stride = tw / static_cast<double>(1 + rng.below(3));
    const auto windows = build_windows(flow, {tw, stride});

    const TimestampUs tw_us = from_seconds(tw), st_us = from_seconds(stride);
    const TimestampUs t0 = flow.front().ts / st_us * st_us;
    std::vector<TimestampUs> starts;
    for (TimestampUs s = t0; s <= flow.back().ts; s += st_us) starts.push_back(s);
    REQUIRE(windows.size() == starts.size());
    for (std::size_t k = 0; k < starts.size(); ++k) {
      CHECK(windows[k].t_start == starts[k]);
      std::size_t n = 0;
      for (const auto& f : flow) n += f.ts >= starts[k] && f.ts < starts[k] + tw_us;
      CHECK(windows[k].frames.size() == n);
    }
    if (stride == tw) {
      std::size_t total = 0;
      for (const auto& w : windows) total += w.frames.size();
      CHECK(total == flow.size());
    }
  }
}

TEST_CASE("equal spacing gives zero jitter") {
  std::vector<GooseFrame> frames;
  for (int i = 0; i < 50; ++i) frames.push_back(at(i * 0.1));
  for (const auto& w : build_windows(frames, {1.0, 1.0})) {
    for (double j : w.jitter_series) CHECK(j == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("jitter uses a five-gap moving median") {
  // gaps: 1, 1, 1, 1, 1, 3, 1 (seconds)
  std::vector<double> t{0, 1, 2, 3, 4, 5, 8, 9};
  std::vector<GooseFrame> frames;
  for (double x : t) frames.push_back(at(x));
  const auto w = build_windows(frames, {100.0, 100.0});
  REQUIRE(w.size() == 1);
  REQUIRE(w[0].jitter_series.size() == 6);
  CHECK(w[0].jitter_series[4] == doctest::Approx(2.0));  // 3 - median(1,1,1,1,1)
  CHECK(w[0].jitter_series[5] == doctest::Approx(0.0));  // 1 - median(1,1,1,1,3)
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(build_windows({}, {0.0, 1.0}), Error);
  CHECK_THROWS_AS(build_windows({}, {1.0, 2.0}), Error);
  CHECK(build_windows({}, {1.0, 0.5}).empty());
}

TEST_CASE("labeling") {
  SUBCASE("frame inside an interval") {
    auto w = build_windows({at(1.7)}, {1.0, 1.0});
    label_windows(w, {{1.5, 3.0, Label::kMS}});
    CHECK(w[0].label == Label::kMS);
  }
  SUBCASE("no overlap gives normal") {
    auto w = build_windows({at(0.2)}, {1.0, 1.0});
    label_windows(w, {{2.0, 3.0, Label::kDoS}});
    CHECK(w[0].label == Label::kNormal);
  }
  SUBCASE("empty suppression window inside an MS interval") {
    auto w = build_windows({at(0.5), at(4.5)}, {1.0, 1.0});
    label_windows(w, {{1.2, 3.0, Label::kMS}});
    REQUIRE(w.size() == 5);
    CHECK(w[0].label == Label::kNormal);
    CHECK(w[1].label == Label::kMS);  // [1,2) meets [1.2,3)
    CHECK(w[2].label == Label::kMS);
    CHECK(w[3].label == Label::kNormal);  // [3,4) is past the half-open end
    CHECK(w[4].label == Label::kNormal);
  }
  SUBCASE("overlapping intervals of one kind") {
    auto w = build_windows({at(0.5)}, {1.0, 1.0});
    try {
      label_windows(w, {{0.0, 2.0, Label::kDM}, {1.0, 3.0, Label::kDM}});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kOverlap);
    }
    CHECK_NOTHROW(label_windows(w, {{0.0, 2.0, Label::kDM}, {1.0, 3.0, Label::kMS}}));
  }
}

TEST_CASE("flow key text form") {
  const FlowKey k{"IED@x", {0, 0x1a, 0xb6, 0, 0, 1}};
  CHECK(k.to_string() == "IED@x@00:1a:b6:00:00:01");
  const auto back = FlowKey::parse(k.to_string());
  REQUIRE(back);
  CHECK(*back == k);
  CHECK_FALSE(FlowKey::parse("no-mac"));
}
