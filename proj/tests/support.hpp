#pragma once

// Helpers shared by the unit tests and the acceptance binary: random frame
// generators and brute-force reference implementations that do not reuse the
// library's own code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "goosead/autoencoder.hpp"
#include "goosead/features.hpp"
#include "goosead/goose.hpp"
#include "goosead/rng.hpp"

namespace goosead::testing {

inline std::string random_ascii(Rng& rng, std::size_t min_len, std::size_t max_len) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_$/.";
  const std::size_t n = min_len + rng.below(max_len - min_len + 1);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += kAlphabet[rng.below(sizeof(kAlphabet) - 1)];
  return s;
}

inline MacAddress random_mac(Rng& rng) {
  MacAddress m;
  for (auto& b : m) b = static_cast<std::uint8_t>(rng.below(256));
  return m;
}

// Any wide-range u32, biased towards BER length boundaries.
inline std::uint32_t random_u32(Rng& rng) {
  switch (rng.below(4)) {
    case 0: return static_cast<std::uint32_t>(rng.below(128));
    case 1: return static_cast<std::uint32_t>(rng.below(65536));
    case 2: return UINT32_MAX - static_cast<std::uint32_t>(rng.below(3));
    default: return static_cast<std::uint32_t>(rng.next_u64());
  }
}

// A random frame that satisfies every encoder precondition.
inline GooseFrame random_frame(Rng& rng) {
  GooseFrame f;
  f.ts = static_cast<TimestampUs>(rng.below(4'000'000'000ull)) * 1'000'000 + static_cast<TimestampUs>(rng.below(1'000'000));
  f.dst_mac = random_mac(rng);
  f.src_mac = random_mac(rng);
  if (rng.below(2)) f.vlan = VlanTag{static_cast<std::uint8_t>(rng.below(8)), static_cast<std::uint16_t>(rng.below(4096))};
  f.appid = static_cast<std::uint16_t>(rng.below(65536));
  f.gocb_ref = random_ascii(rng, 1, kMaxGooseString);
  f.dat_set = random_ascii(rng, 0, kMaxGooseString);
  f.go_id = rng.below(3) == 0 ? std::string() : random_ascii(rng, 1, kMaxGooseString);
  f.ttl_ms = std::max<std::uint32_t>(1, random_u32(rng));
  for (auto& b : f.event_ts) b = static_cast<std::uint8_t>(rng.below(256));
  f.st_num = random_u32(rng);
  f.sq_num = random_u32(rng);
  f.test = rng.below(2) == 1;
  f.conf_rev = random_u32(rng);
  f.nds_com = rng.below(2) == 1;
  f.num_entries = random_u32(rng);
  f.all_data.resize(rng.below(rng.below(8) == 0 ? 1200 : 60));
  for (auto& b : f.all_data) b = static_cast<std::uint8_t>(rng.below(256));
  refresh_lengths(f);
  return f;
}

// One flow of frames with irregular gaps, bursts and counter anomalies.
inline std::vector<GooseFrame> random_flow(Rng& rng, std::size_t n, TimestampUs t0) {
  std::vector<GooseFrame> out;
  TimestampUs t = t0;
  std::uint32_t st = static_cast<std::uint32_t>(rng.below(50)), sq = static_cast<std::uint32_t>(rng.below(50));
  for (std::size_t i = 0; i < n; ++i) {
    GooseFrame f;
    f.go_id = "F";
    f.gocb_ref = "F/LLN0$GO$gcb";
    f.src_mac = {0, 1, 2, 3, 4, 5};
    f.dst_mac = {0x01, 0x0C, 0xCD, 0x01, 0x00, 0x01};
    if (rng.below(10) == 0) f.dst_mac[0] = 0x00;
    f.ts = t;
    f.st_num = st;
    f.sq_num = sq;
    f.ttl_ms = 1 + static_cast<std::uint32_t>(rng.below(5000));
    f.frame_len = 60 + static_cast<std::uint32_t>(rng.below(300));
    out.push_back(f);

    switch (rng.below(12)) {
      case 0: t += static_cast<TimestampUs>(rng.below(3'000'000)); break;  // long gap
      case 1: t += 0; break;                                              // duplicate timestamp
      default: t += 1 + static_cast<TimestampUs>(rng.below(200'000)); break;
    }
    switch (rng.below(10)) {
      case 0: st += 1; sq = 0; break;
      case 1: st += 1 + static_cast<std::uint32_t>(rng.below(200)); sq = static_cast<std::uint32_t>(rng.below(5)); break;
      case 2: sq = sq > 3 ? sq - 3 : 0; break;
      case 3: sq += 2 + static_cast<std::uint32_t>(rng.below(20)); break;
      case 4: if (st > 0) st -= 1; break;
      default: sq += 1; break;
    }
  }
  return out;
}

// Brute-force features of the window [start, start + tw) of one flow,
// computed from the whole sorted flow rather than from a FlowWindow.
inline FeatureRow oracle_features(const std::vector<GooseFrame>& flow, TimestampUs start, TimestampUs tw) {
  FeatureRow r;
  r.fill(kMissing);

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < flow.size(); ++i) {
    if (flow[i].ts >= start && flow[i].ts < start + tw) idx.push_back(i);
  }
  const double n = static_cast<double>(idx.size());
  r[3] = n;

  auto dt_at = [&](std::size_t i) { return static_cast<double>(flow[i].ts - flow[i - 1].ts) / 1e6; };
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 ? v[m / 2] : (v[m / 2 - 1] + v[m / 2]) / 2.0;
  };
  auto mean = [](const std::vector<double>& v) {
    long double s = 0;
    for (double x : v) s += x;
    return static_cast<double>(s / v.size());
  };
  auto pstd = [&](const std::vector<double>& v) {
    const double mu = mean(v);
    long double s = 0;
    for (double x : v) s += (x - mu) * (x - mu);
    return static_cast<double>(std::sqrt(s / v.size()));
  };

  if (!idx.empty()) {
    std::vector<double> dts, inv, jit;
    for (std::size_t i : idx) {
      if (i == 0) continue;
      const double d = dt_at(i);
      dts.push_back(d);
      inv.push_back(1.0 / std::max(d, 1e-6));
      if (i >= 2) {
        // pair index j = i - 1 >= 1; history is the previous min(j, 5) pair gaps
        const std::size_t j = i - 1, m = std::min<std::size_t>(j, 5);
        std::vector<double> hist;
        for (std::size_t k = j - m; k < j; ++k) hist.push_back(dt_at(k + 1));
        jit.push_back(std::fabs(d - median(hist)));
      }
    }
    if (!dts.empty()) {
      r[0] = mean(dts);
      r[1] = pstd(dts);
      r[2] = mean(inv);
    }
    if (!jit.empty()) {
      r[4] = mean(jit);
      r[5] = pstd(jit);
    }
    std::vector<double> len, ttl;
    for (std::size_t i : idx) {
      len.push_back(flow[i].frame_len);
      ttl.push_back(flow[i].ttl_ms);
    }
    r[6] = mean(len);
    r[7] = mean(ttl);
  }

  // Sequence view: pairs (i - 1, i) for each in-window frame with a predecessor.
  if (idx.empty()) {
    for (std::size_t c = 8; c < 13; ++c) r[c] = 0.0;
    r[13] = kMissing;
    return r;
  }
  long long st_changes = 0, resets = 0, bigjump = 0, jump_max = 0;
  long long sq_lo = flow[idx.front()].sq_num, sq_hi = sq_lo;
  long long bad = 0;
  for (std::size_t i : idx) {
    if (i > 0) {
      const long long ds = static_cast<long long>(flow[i].st_num) - flow[i - 1].st_num;
      const long long dq = static_cast<long long>(flow[i].sq_num) - flow[i - 1].sq_num;
      st_changes += ds > 0;
      resets += ds == 0 && dq < 0;
      bigjump += ds == 0 && dq > 1;
      jump_max = std::max(jump_max, ds);
    }
    sq_lo = std::min<long long>(sq_lo, flow[i].sq_num);
    sq_hi = std::max<long long>(sq_hi, flow[i].sq_num);
    bad += (flow[i].dst_mac[0] & 1) == 0;
  }
  r[8] = static_cast<double>(st_changes);
  r[9] = static_cast<double>(resets);
  r[10] = static_cast<double>(bigjump);
  r[11] = static_cast<double>(sq_hi - sq_lo);
  r[12] = static_cast<double>(jump_max);
  r[13] = static_cast<double>(bad) / n;
  return r;
}

// Equality used by the oracle comparisons: exact for integers and NaN
// patterns, relative tolerance for reals.
inline bool feature_close(double a, double b, double rel = 1e-12) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  if (a == b) return true;
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

// Mean per-row MSE of a batch, straight from forward().
inline double batch_loss(const AeModel& m, std::span<const double> data, std::span<const std::size_t> rows) {
  const std::size_t w = m.input_width();
  double loss = 0.0;
  for (std::size_t r : rows) {
    const auto x = data.subspan(r * w, w);
    loss += mse(x, forward(m, x).output);
  }
  return loss / static_cast<double>(rows.size());
}

// Largest relative gap between backprop() and central finite differences
// over every weight and bias. The denominator is floored so that parameters
// with vanishing gradients are judged on an absolute 1e-7 scale.
inline double max_gradient_error(AeModel m, std::span<const double> data, std::span<const std::size_t> rows,
                                 double eps = 1e-5) {
  Gradients g;
  backprop(m, data, rows, g);
  double worst = 0.0;
  auto check = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + eps;
    const double up = batch_loss(m, data, rows);
    param = saved - eps;
    const double down = batch_loss(m, data, rows);
    param = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-7});
    worst = std::max(worst, std::fabs(analytic - numeric) / denom);
  };
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    for (std::size_t i = 0; i < m.layers[l].weights.size(); ++i) check(m.layers[l].weights[i], g.layers[l].weights[i]);
    for (std::size_t i = 0; i < m.layers[l].bias.size(); ++i) check(m.layers[l].bias[i], g.layers[l].bias[i]);
  }
  return worst;
}

// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("goosead_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace goosead::testing
