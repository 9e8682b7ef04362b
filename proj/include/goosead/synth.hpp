#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "goosead/goose.hpp"
#include "goosead/windowing.hpp"

namespace goosead {

// One simulated GOOSE publisher.
struct PublisherSpec {
  std::string go_id;
  std::string gocb_ref;
  std::string dat_set;
  MacAddress src_mac{};
  MacAddress dst_mac{0x01, 0x0C, 0xCD, 0x01, 0x00, 0x01};
  std::uint16_t appid = 0x0001;
  std::optional<VlanTag> vlan;
  double t_min_ms = 4.0;
  double t_max_ms = 1000.0;
  double ttl_factor = 2.0;   // ttl = ttl_factor x interval to the next frame
  double event_rate = 0.0;   // Poisson state changes per second
  std::uint32_t frame_len_base = 0;  // pad allData up to this frame length (0 = no padding)
  std::uint32_t num_entries = 4;
  std::uint32_t conf_rev = 1;
  std::uint32_t initial_st_num = 1;
  std::uint32_t initial_sq_num = 0;
  double jitter_frac = 0.02;  // each interval scaled by 1 + U(-j, j)
  std::uint64_t seed = 0;

  void validate() const;  // throws Error(kConfig)
};

struct AttackSpec {
  Label kind = Label::kMS;
  double start_s = 0.0;      // relative to the scenario start
  double duration_s = 0.0;
  std::string victim;        // victim goID/gocbRef; empty = first publisher
  // MS
  double drop_fraction = 1.0;
  // DM
  std::int64_t st_delta = 100;
  bool unicast_dst = false;
  bool mutate_payload = true;
  double forged_t_min_ms = 4.0;
  double forged_t_max_ms = 100.0;
  // DoS
  double flood_rate = 1000.0;  // frames per second
  bool spoof_src = false;
  MacAddress attacker_mac{0x02, 0x00, 0x00, 0x00, 0xDE, 0xAD};
  std::uint64_t seed = 0;
};

struct Scenario {
  int version = 1;
  std::uint64_t seed = 1;
  double span_s = 60.0;
  double start_epoch_s = 1'700'000'000.0;
  std::vector<PublisherSpec> publishers;
  std::vector<AttackSpec> attacks;
};

struct SynthOutput {
  std::vector<GooseFrame> frames;        // sorted by timestamp
  std::vector<AttackInterval> labels;    // absolute seconds
};

// Heartbeats every t_max with sqNum + 1; each Poisson event bumps stNum,
// restarts sqNum at 0 and retransmits after t_min, 2 t_min, 4 t_min, ...
// capped at t_max. Frames of all publishers are merged in timestamp order.
std::vector<GooseFrame> gen_normal(const std::vector<PublisherSpec>& publishers, double span_s,
                                   double start_epoch_s = 0.0);

// Each injector returns the modified, timestamp-sorted frames and appends the
// attack's absolute interval to `labels`. `start_epoch_s` converts the
// relative attack start.
std::vector<GooseFrame> inject_ms(std::vector<GooseFrame> frames, const AttackSpec& spec,
                                  double start_epoch_s, std::vector<AttackInterval>& labels);
std::vector<GooseFrame> inject_dm(std::vector<GooseFrame> frames, const AttackSpec& spec,
                                  double start_epoch_s, std::vector<AttackInterval>& labels);
std::vector<GooseFrame> inject_dos(std::vector<GooseFrame> frames, const AttackSpec& spec,
                                   double start_epoch_s, std::vector<AttackInterval>& labels);

// Normal traffic plus every attack, in listing order.
SynthOutput run_scenario(const Scenario& scenario);

}  // namespace goosead
