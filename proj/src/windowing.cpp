#include "goosead/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "goosead/error.hpp"

namespace goosead {

namespace {

TimestampUs floor_div(TimestampUs a, TimestampUs b) {
  TimestampUs q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TimestampUs to_us(double seconds) { return static_cast<TimestampUs>(std::llround(seconds * 1e6)); }

}  // namespace

std::string_view label_name(Label label) {
  switch (label) {
    case Label::kNormal: return "normal";
    case Label::kMS: return "MS";
    case Label::kDM: return "DM";
    case Label::kDoS: return "DoS";
    case Label::kUnlabeled: return "unlabeled";
  }
  return "unlabeled";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "normal") return Label::kNormal;
  if (text == "MS") return Label::kMS;
  if (text == "DM") return Label::kDM;
  if (text == "DoS") return Label::kDoS;
  if (text == "unlabeled" || text.empty()) return Label::kUnlabeled;
  return std::nullopt;
}

std::string FlowKey::to_string() const { return goose_id + "@" + mac_to_string(src_mac); }

std::optional<FlowKey> FlowKey::parse(std::string_view text) {
  const auto at = text.rfind('@');
  if (at == std::string_view::npos || at == 0) return std::nullopt;
  auto mac = parse_mac(text.substr(at + 1));
  if (!mac) return std::nullopt;
  return FlowKey{std::string(text.substr(0, at)), *mac};
}

void WindowConfig::validate() const {
  if (!(t_w > 0.0) || !std::isfinite(t_w)) {
    throw Error(ErrorKind::kConfig, "window length must be > 0");
  }
  if (!(stride > 0.0) || stride > t_w) {
    throw Error(ErrorKind::kConfig, "stride must satisfy 0 < stride <= window length");
  }
  if (to_us(stride) < 1) throw Error(ErrorKind::kConfig, "stride below 1 microsecond");
}

std::vector<FlowWindow> build_windows(const std::vector<GooseFrame>& frames,
                                      const WindowConfig& config) {
  config.validate();
  const TimestampUs tw = to_us(config.t_w);
  const TimestampUs stride = to_us(config.stride);

  std::map<FlowKey, std::vector<const GooseFrame*>> flows;
  for (const auto& f : frames) flows[FlowKey::of(f)].push_back(&f);

  std::vector<FlowWindow> out;
  for (auto& [key, members] : flows) {
    std::stable_sort(members.begin(), members.end(),
                     [](const GooseFrame* a, const GooseFrame* b) { return a->ts < b->ts; });
    const std::size_t n = members.size();

    // dt[j] spans frames j and j+1; jitter[j] defined for j >= 1.
    std::vector<double> dt(n > 0 ? n - 1 : 0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
      dt[j] = to_seconds(members[j + 1]->ts - members[j]->ts);
    }
    std::vector<double> jitter(dt.size(), 0.0);
    for (std::size_t j = 1; j < dt.size(); ++j) {
      const std::size_t m = std::min(j, kJitterLookback);
      jitter[j] = std::abs(dt[j] - median_of({dt.begin() + (j - m), dt.begin() + j}));
    }

    const TimestampUs t0 = floor_div(members.front()->ts, stride) * stride;
    const TimestampUs k_max = (members.back()->ts - t0) / stride;
    std::size_t lo = 0;  // first frame with ts >= window start
    for (TimestampUs k = 0; k <= k_max; ++k) {
      const TimestampUs start = t0 + k * stride;
      while (lo < n && members[lo]->ts < start) ++lo;
      std::size_t hi = lo;
      while (hi < n && members[hi]->ts < start + tw) ++hi;

      FlowWindow w;
      w.key = key;
      w.t_start = start;
      w.t_w = tw;
      w.frames.reserve(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) w.frames.push_back(*members[i]);
      if (lo > 0) w.seed = *members[lo - 1];
      if (hi > lo) {
        // Pairs (i-1, i) for every window frame i that has a predecessor.
        for (std::size_t i = std::max<std::size_t>(lo, 1); i < hi; ++i) {
          w.dt_series.push_back(dt[i - 1]);
          if (i - 1 >= 1) w.jitter_series.push_back(jitter[i - 1]);
        }
      }
      out.push_back(std::move(w));
    }
  }
  return out;
}

void label_windows(std::vector<FlowWindow>& windows, const std::vector<AttackInterval>& intervals) {
  std::vector<AttackInterval> sorted = intervals;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.start_s < b.start_s;
  });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!is_attack(sorted[i].kind)) {
      throw Error(ErrorKind::kConfig, "attack interval kind must be MS, DM or DoS");
    }
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (sorted[j].kind != sorted[i].kind) continue;
      if (sorted[j].start_s < sorted[i].end_s && sorted[i].start_s < sorted[j].end_s) {
        throw Error(ErrorKind::kOverlap, "OverlappingIntervals for kind " +
                                             std::string(label_name(sorted[i].kind)));
      }
    }
  }

  for (auto& w : windows) {
    w.label = Label::kNormal;
    for (const auto& iv : sorted) {
      const TimestampUs s = to_us(iv.start_s);
      const TimestampUs e = to_us(iv.end_s);
      if (e <= s) continue;
      bool hit = false;
      if (w.frames.empty()) {
        hit = w.t_start < e && s < w.t_start + w.t_w;
      } else {
        hit = std::any_of(w.frames.begin(), w.frames.end(),
                          [&](const GooseFrame& f) { return f.ts >= s && f.ts < e; });
      }
      if (hit) {
        w.label = iv.kind;
        break;
      }
    }
  }
}

}  // namespace goosead
