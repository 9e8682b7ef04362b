#include "goosead/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace goosead {

namespace {

struct MeanStd {
  double mean = kMissing;
  double std = kMissing;
};

// Population statistics; std is 0 for one sample, both missing for none.
MeanStd mean_std(std::span<const double> v) {
  MeanStd r;
  if (v.empty()) return r;
  double sum = 0.0;
  for (double x : v) sum += x;
  r.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(v.size()));
  return r;
}

}  // namespace

std::string_view view_name(View view) { return view == View::kSeq ? "seq" : "temp"; }

std::size_t feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (kFeatureColumns[i].name == name) return i;
  }
  return kNumFeatures;
}

TempVector extract_temporal(const FlowWindow& w) {
  TempVector t;
  t.fill(kMissing);
  t[3] = static_cast<double>(w.frames.size());
  if (w.frames.empty()) return t;

  const MeanStd dt = mean_std(w.dt_series);
  t[0] = dt.mean;
  t[1] = dt.std;
  if (!w.dt_series.empty()) {
    double inv = 0.0;
    for (double d : w.dt_series) inv += 1.0 / std::max(d, kMinDt);
    t[2] = inv / static_cast<double>(w.dt_series.size());
  }
  const MeanStd jit = mean_std(w.jitter_series);
  t[4] = jit.mean;
  t[5] = jit.std;

  double len = 0.0, ttl = 0.0;
  for (const auto& f : w.frames) {
    len += f.frame_len;
    ttl += f.ttl_ms;
  }
  t[6] = len / static_cast<double>(w.frames.size());
  t[7] = ttl / static_cast<double>(w.frames.size());
  return t;
}

SeqVector extract_sequence(const FlowWindow& w) {
  SeqVector s{};
  if (w.frames.empty()) {
    s[5] = kMissing;
    return s;
  }

  // Counter pairs include the seed frame so that a gap at a window boundary
  // is still visible to the window after it.
  const GooseFrame* prev = w.seed ? &*w.seed : nullptr;
  std::int64_t st_changes = 0, sq_resets = 0, sq_bigjump = 0, st_jump_max = 0;
  std::uint32_t sq_min = w.frames.front().sq_num, sq_max = sq_min;
  std::size_t bad_dst = 0;
  for (const auto& f : w.frames) {
    if (prev) {
      const std::int64_t dst = static_cast<std::int64_t>(f.st_num) - prev->st_num;
      const std::int64_t dsq = static_cast<std::int64_t>(f.sq_num) - prev->sq_num;
      if (dst > 0) ++st_changes;
      if (dst == 0 && dsq < 0) ++sq_resets;
      if (dst == 0 && dsq > 1) ++sq_bigjump;
      st_jump_max = std::max(st_jump_max, dst);
    }
    sq_min = std::min(sq_min, f.sq_num);
    sq_max = std::max(sq_max, f.sq_num);
    if (!is_group_address(f.dst_mac)) ++bad_dst;
    prev = &f;
  }
  s[0] = static_cast<double>(st_changes);
  s[1] = static_cast<double>(sq_resets);
  s[2] = static_cast<double>(sq_bigjump);
  s[3] = static_cast<double>(sq_max - sq_min);
  s[4] = static_cast<double>(st_jump_max);
  s[5] = static_cast<double>(bad_dst) / static_cast<double>(w.frames.size());
  return s;
}

FeatureRow extract_features(const FlowWindow& w) {
  FeatureRow row;
  const TempVector t = extract_temporal(w);
  const SeqVector s = extract_sequence(w);
  std::copy(t.begin(), t.end(), row.begin() + kTempOffset);
  std::copy(s.begin(), s.end(), row.begin() + kSeqOffset);
  return row;
}

std::vector<double> FeatureMatrix::view_slice(View view) const {
  const std::size_t off = view_offset(view), width = view_width(view);
  std::vector<double> out;
  out.reserve(rows.size() * width);
  for (const auto& r : rows) out.insert(out.end(), r.begin() + off, r.begin() + off + width);
  return out;
}

FeatureMatrix extract_all(const std::vector<FlowWindow>& windows) {
  FeatureMatrix m;
  m.meta.reserve(windows.size());
  m.rows.reserve(windows.size());
  for (const auto& w : windows) {
    m.meta.push_back(RowMeta{w.key, w.t_start, w.t_w, w.label});
    m.rows.push_back(extract_features(w));
  }
  return m;
}

FeatureMatrix assemble(FeatureMatrix raw, Scope scope) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    const auto& r = raw.rows[i];
    if (std::any_of(r.begin(), r.end(), [](double v) { return !std::isnan(v); })) {
      order.push_back(i);
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ma = raw.meta[a];
    const auto& mb = raw.meta[b];
    if (ma.flow != mb.flow) return ma.flow < mb.flow;
    return ma.t_start < mb.t_start;
  });

  FeatureMatrix m;
  m.meta.reserve(order.size());
  m.rows.reserve(order.size());
  for (std::size_t i : order) {
    m.meta.push_back(std::move(raw.meta[i]));
    m.rows.push_back(raw.rows[i]);
  }

  // Global means are the last-resort fill for a flow that never observed a column.
  std::array<double, kNumFeatures> global_mean{};
  for (std::size_t c = 0; c < kNumFeatures; ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : m.rows) {
      if (!std::isnan(r[c])) {
        sum += r[c];
        ++n;
      }
    }
    global_mean[c] = n ? sum / static_cast<double>(n) : 0.0;
  }

  std::size_t begin = 0;
  while (begin < m.rows.size()) {
    std::size_t end = begin + 1;
    while (end < m.rows.size() && m.meta[end].flow == m.meta[begin].flow) ++end;

    for (std::size_t c = 0; c < kNumFeatures; ++c) {
      if (!kFeatureColumns[c].continuous) {
        for (std::size_t i = begin; i < end; ++i) {
          if (std::isnan(m.rows[i][c])) m.rows[i][c] = 0.0;
        }
        continue;
      }
      std::vector<std::size_t> known;
      for (std::size_t i = begin; i < end; ++i) {
        if (!std::isnan(m.rows[i][c])) known.push_back(i);
      }
      if (known.empty()) {
        for (std::size_t i = begin; i < end; ++i) m.rows[i][c] = global_mean[c];
        continue;
      }
      std::size_t next = 0;  // index into known of the first known row >= i
      for (std::size_t i = begin; i < end; ++i) {
        while (next < known.size() && known[next] < i) ++next;
        if (!std::isnan(m.rows[i][c])) continue;
        if (next == 0) {
          m.rows[i][c] = m.rows[known.front()][c];
        } else if (next == known.size()) {
          m.rows[i][c] = m.rows[known.back()][c];
        } else {
          const std::size_t a = known[next - 1], b = known[next];
          const double ta = static_cast<double>(m.meta[a].t_start);
          const double tb = static_cast<double>(m.meta[b].t_start);
          const double ti = static_cast<double>(m.meta[i].t_start);
          const double frac = tb > ta ? (ti - ta) / (tb - ta) : 0.5;
          m.rows[i][c] = m.rows[a][c] + frac * (m.rows[b][c] - m.rows[a][c]);
        }
      }
    }
    begin = end;
  }

  if (scope == Scope::kTrain) {
    for (std::size_t c = 0; c < kNumFeatures; ++c) {
      double mean = 0.0;
      for (const auto& r : m.rows) mean += r[c];
      mean /= std::max<std::size_t>(m.rows.size(), 1);
      double var = 0.0;
      for (const auto& r : m.rows) var += (r[c] - mean) * (r[c] - mean);
      var /= std::max<std::size_t>(m.rows.size(), 1);
      m.degenerate[c] = var < kDegenerateVariance;
    }
  } else {
    m.degenerate = raw.degenerate;
  }
  return m;
}

}  // namespace goosead
