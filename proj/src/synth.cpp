#include "goosead/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "goosead/error.hpp"
#include "goosead/rng.hpp"

namespace goosead {

namespace {

constexpr std::uint8_t kMmsBoolean = 0x83;
constexpr std::uint8_t kMmsOctetString = 0x89;

// IEC 61850 UtcTime: 4 octets seconds, 3 octets binary fraction, 1 quality octet.
std::array<std::uint8_t, 8> utc_time(TimestampUs ts) {
  const std::int64_t sec = ts / 1'000'000;
  const std::int64_t us = ts % 1'000'000;
  const std::uint32_t frac = static_cast<std::uint32_t>((us << 24) / 1'000'000);
  return {static_cast<std::uint8_t>(sec >> 24), static_cast<std::uint8_t>(sec >> 16),
          static_cast<std::uint8_t>(sec >> 8),  static_cast<std::uint8_t>(sec),
          static_cast<std::uint8_t>(frac >> 16), static_cast<std::uint8_t>(frac >> 8),
          static_cast<std::uint8_t>(frac),       0x0A};
}

std::vector<std::uint8_t> encode_all_data(const std::vector<bool>& bits, std::size_t padding) {
  std::vector<std::uint8_t> out;
  for (bool b : bits) {
    out.push_back(kMmsBoolean);
    out.push_back(0x01);
    out.push_back(b ? 0xFF : 0x00);
  }
  if (padding > 0) {
    out.push_back(kMmsOctetString);
    if (padding < 0x80) {
      out.push_back(static_cast<std::uint8_t>(padding));
    } else {
      out.push_back(0x82);
      out.push_back(static_cast<std::uint8_t>(padding >> 8));
      out.push_back(static_cast<std::uint8_t>(padding & 0xFF));
    }
    out.insert(out.end(), padding, 0x00);
  }
  return out;
}

// Inverts boolean items in place; other items get their content bits flipped.
std::vector<std::uint8_t> mutate_all_data(std::vector<std::uint8_t> data) {
  std::size_t pos = 0;
  while (pos + 2 <= data.size()) {
    const std::uint8_t tag = data[pos];
    std::size_t len = data[pos + 1];
    std::size_t hdr = 2;
    if (len & 0x80) {
      const std::size_t n = len & 0x7F;
      if (n == 0 || n > 2 || pos + 2 + n > data.size()) break;
      len = 0;
      for (std::size_t i = 0; i < n; ++i) len = (len << 8) | data[pos + 2 + i];
      hdr += n;
    }
    if (pos + hdr + len > data.size()) break;
    if (tag == kMmsBoolean && len == 1) {
      data[pos + hdr] = data[pos + hdr] ? 0x00 : 0xFF;
    } else if (tag != kMmsOctetString) {
      for (std::size_t i = 0; i < len; ++i) data[pos + hdr + i] ^= 0xFF;
    }
    pos += hdr + len;
  }
  return data;
}

void sort_frames(std::vector<GooseFrame>& frames) {
  std::stable_sort(frames.begin(), frames.end(),
                   [](const GooseFrame& a, const GooseFrame& b) { return a.ts < b.ts; });
}

bool is_victim(const GooseFrame& f, const std::string& victim) {
  return f.goose_identity() == victim;
}

// Victim identity defaults to the first identity seen.
std::string resolve_victim(const std::vector<GooseFrame>& frames, const AttackSpec& spec) {
  if (!spec.victim.empty()) return spec.victim;
  if (frames.empty()) throw Error(ErrorKind::kConfig, "attack needs background traffic");
  return frames.front().goose_identity();
}

// Latest victim frame at or before `ts`, else the first victim frame.
const GooseFrame& victim_template(const std::vector<GooseFrame>& frames, const std::string& victim,
                                  TimestampUs ts) {
  const GooseFrame* best = nullptr;
  for (const auto& f : frames) {
    if (!is_victim(f, victim)) continue;
    if (f.ts <= ts || !best) best = &f;
    if (f.ts > ts) break;
  }
  if (!best) throw Error(ErrorKind::kConfig, "attack victim '" + victim + "' publishes no frames");
  return *best;
}

AttackInterval interval_of(const AttackSpec& spec, double start_epoch_s) {
  return {start_epoch_s + spec.start_s, start_epoch_s + spec.start_s + spec.duration_s, spec.kind};
}

void validate_attack(const AttackSpec& spec) {
  if (!(spec.duration_s >= 0.0) || !std::isfinite(spec.start_s)) {
    throw Error(ErrorKind::kConfig, "attack start/duration invalid");
  }
}

}  // namespace

void PublisherSpec::validate() const {
  if (go_id.empty() && gocb_ref.empty()) {
    throw Error(ErrorKind::kConfig, "publisher needs a go_id or gocb_ref");
  }
  if (!(t_min_ms > 0.0) || !(t_max_ms >= t_min_ms)) {
    throw Error(ErrorKind::kConfig, "publisher " + go_id + ": need 0 < t_min <= t_max");
  }
  if (!is_group_address(dst_mac)) {
    throw Error(ErrorKind::kConfig, "publisher " + go_id + ": destination must be multicast");
  }
  if (!(ttl_factor > 0.0) || event_rate < 0.0 || jitter_frac < 0.0 || jitter_frac >= 1.0) {
    throw Error(ErrorKind::kConfig, "publisher " + go_id + ": ttl_factor/event_rate/jitter out of range");
  }
}

std::vector<GooseFrame> gen_normal(const std::vector<PublisherSpec>& publishers, double span_s,
                                   double start_epoch_s) {
  if (!(span_s > 0.0)) throw Error(ErrorKind::kConfig, "span must be > 0");
  const TimestampUs base = from_seconds(start_epoch_s);
  std::vector<GooseFrame> all;

  for (const auto& p : publishers) {
    p.validate();
    Rng rng(p.seed);
    const double t_min = p.t_min_ms * 1e-3;
    const double t_max = p.t_max_ms * 1e-3;

    std::vector<bool> bits(p.num_entries, false);
    GooseFrame tmpl;
    tmpl.dst_mac = p.dst_mac;
    tmpl.src_mac = p.src_mac;
    tmpl.vlan = p.vlan;
    tmpl.appid = p.appid;
    tmpl.gocb_ref = p.gocb_ref;
    tmpl.dat_set = p.dat_set;
    tmpl.go_id = p.go_id;
    tmpl.conf_rev = p.conf_rev;
    tmpl.ttl_ms = 1;
    tmpl.st_num = p.initial_st_num;
    tmpl.sq_num = p.initial_sq_num;
    tmpl.all_data = encode_all_data(bits, 0);
    std::size_t padding = 0;
    refresh_lengths(tmpl);
    if (p.frame_len_base > tmpl.frame_len + 4) {
      // The padding element's own tag and length octets count toward the target.
      const std::size_t extra = p.frame_len_base - tmpl.frame_len;
      padding = extra - (extra - 2 < 0x80 ? 2 : 4);
    }
    tmpl.num_entries = p.num_entries + (padding > 0 ? 1 : 0);

    double t = rng.uniform(0.0, t_max);
    double interval = t_max;
    double next_event = p.event_rate > 0.0 ? t + rng.exponential(p.event_rate)
                                           : std::numeric_limits<double>::infinity();
    std::uint32_t st = p.initial_st_num;
    std::uint32_t sq = p.initial_sq_num;
    TimestampUs last_change = base;
    while (t < span_s) {
      GooseFrame f = tmpl;
      f.ts = base + from_seconds(t);
      f.st_num = st;
      f.sq_num = sq;
      f.ttl_ms = static_cast<std::uint32_t>(std::max<long long>(1, std::llround(p.ttl_factor * interval * 1e3)));
      f.event_ts = utc_time(last_change);
      f.all_data = encode_all_data(bits, padding);
      refresh_lengths(f);
      all.push_back(std::move(f));

      const double nominal = t + interval * (1.0 + rng.uniform(-p.jitter_frac, p.jitter_frac));
      if (next_event < nominal) {
        t = next_event;
        ++st;
        sq = 0;
        interval = t_min;
        if (!bits.empty()) bits[rng.below(bits.size())].flip();
        last_change = base + from_seconds(t);
        next_event += rng.exponential(p.event_rate);
      } else {
        t = nominal;
        ++sq;
        interval = std::min(interval * 2.0, t_max);
      }
    }
  }
  sort_frames(all);
  return all;
}

std::vector<GooseFrame> inject_ms(std::vector<GooseFrame> frames, const AttackSpec& spec,
                                  double start_epoch_s, std::vector<AttackInterval>& labels) {
  validate_attack(spec);
  if (spec.drop_fraction < 0.0 || spec.drop_fraction > 1.0) {
    throw Error(ErrorKind::kConfig, "drop_fraction must lie in [0, 1]");
  }
  const AttackInterval iv = interval_of(spec, start_epoch_s);
  labels.push_back(iv);
  if (spec.duration_s <= 0.0 || frames.empty()) return frames;

  const std::string victim = resolve_victim(frames, spec);
  const TimestampUs s = from_seconds(iv.start_s), e = from_seconds(iv.end_s);
  Rng rng(spec.seed);
  std::vector<GooseFrame> out;
  out.reserve(frames.size());
  for (auto& f : frames) {
    if (is_victim(f, victim) && f.ts >= s && f.ts < e && rng.uniform() < spec.drop_fraction) continue;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<GooseFrame> inject_dm(std::vector<GooseFrame> frames, const AttackSpec& spec,
                                  double start_epoch_s, std::vector<AttackInterval>& labels) {
  validate_attack(spec);
  if (!(spec.forged_t_min_ms > 0.0) || spec.forged_t_max_ms < spec.forged_t_min_ms) {
    throw Error(ErrorKind::kConfig, "DM forged interval bounds invalid");
  }
  const AttackInterval iv = interval_of(spec, start_epoch_s);
  labels.push_back(iv);
  if (spec.duration_s <= 0.0 || frames.empty()) return frames;

  const std::string victim = resolve_victim(frames, spec);
  const TimestampUs s = from_seconds(iv.start_s), e = from_seconds(iv.end_s);
  const GooseFrame tmpl = victim_template(frames, victim, s);
  const std::int64_t forged_st = static_cast<std::int64_t>(tmpl.st_num) + spec.st_delta;
  if (forged_st < 0 || forged_st > UINT32_MAX) {
    throw Error(ErrorKind::kConfig, "DM st_delta moves stNum out of range");
  }

  std::vector<GooseFrame> forged;
  double offset = 0.0;
  double interval = spec.forged_t_min_ms * 1e-3;
  std::uint32_t sq = 0;
  while (s + from_seconds(offset) < e) {
    GooseFrame f = tmpl;
    f.ts = s + from_seconds(offset);
    f.st_num = static_cast<std::uint32_t>(forged_st);
    f.sq_num = sq++;
    f.event_ts = utc_time(s);
    if (spec.mutate_payload) f.all_data = mutate_all_data(f.all_data);
    if (spec.unicast_dst) f.dst_mac = {0x00, 0x1B, 0x21, 0x00, 0x00, 0x01};
    refresh_lengths(f);
    forged.push_back(std::move(f));
    offset += interval;
    interval = std::min(interval * 2.0, spec.forged_t_max_ms * 1e-3);
  }
  frames.insert(frames.end(), std::make_move_iterator(forged.begin()),
                std::make_move_iterator(forged.end()));
  sort_frames(frames);
  return frames;
}

std::vector<GooseFrame> inject_dos(std::vector<GooseFrame> frames, const AttackSpec& spec,
                                   double start_epoch_s, std::vector<AttackInterval>& labels) {
  validate_attack(spec);
  if (spec.flood_rate < 0.0) throw Error(ErrorKind::kConfig, "flood_rate must be >= 0");
  const AttackInterval iv = interval_of(spec, start_epoch_s);
  labels.push_back(iv);
  const auto count = static_cast<std::size_t>(std::llround(spec.flood_rate * spec.duration_s));
  if (count == 0 || frames.empty()) return frames;

  const std::string victim = resolve_victim(frames, spec);
  const TimestampUs s = from_seconds(iv.start_s);
  GooseFrame tmpl = victim_template(frames, victim, s);
  if (!spec.spoof_src) tmpl.src_mac = spec.attacker_mac;
  Rng rng(spec.seed);
  const std::size_t before = frames.size();
  frames.reserve(before + count);
  for (std::size_t i = 0; i < count; ++i) {
    GooseFrame f = tmpl;
    f.ts = s + from_seconds((static_cast<double>(i) + rng.uniform()) / spec.flood_rate);
    f.sq_num = static_cast<std::uint32_t>(i);
    refresh_lengths(f);
    frames.push_back(std::move(f));
  }
  sort_frames(frames);
  return frames;
}

SynthOutput run_scenario(const Scenario& scenario) {
  std::vector<PublisherSpec> pubs = scenario.publishers;
  if (pubs.empty()) throw Error(ErrorKind::kConfig, "scenario lists no publishers");
  for (std::size_t i = 0; i < pubs.size(); ++i) {
    if (pubs[i].seed == 0) pubs[i].seed = scenario.seed * 1'000'003ull + i + 1;
  }
  SynthOutput out;
  out.frames = gen_normal(pubs, scenario.span_s, scenario.start_epoch_s);
  for (std::size_t i = 0; i < scenario.attacks.size(); ++i) {
    AttackSpec a = scenario.attacks[i];
    if (a.seed == 0) a.seed = scenario.seed * 7'919ull + 101 * (i + 1);
    if (a.start_s < 0.0 || a.start_s + a.duration_s > scenario.span_s) {
      throw Error(ErrorKind::kConfig, "attack " + std::to_string(i) + " lies outside the capture span");
    }
    switch (a.kind) {
      case Label::kMS: out.frames = inject_ms(std::move(out.frames), a, scenario.start_epoch_s, out.labels); break;
      case Label::kDM: out.frames = inject_dm(std::move(out.frames), a, scenario.start_epoch_s, out.labels); break;
      case Label::kDoS: out.frames = inject_dos(std::move(out.frames), a, scenario.start_epoch_s, out.labels); break;
      default: throw Error(ErrorKind::kConfig, "attack kind must be MS, DM or DoS");
    }
  }
  return out;
}

}  // namespace goosead
