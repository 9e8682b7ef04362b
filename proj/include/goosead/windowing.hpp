#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "goosead/goose.hpp"

namespace goosead {

enum class Label { kNormal, kMS, kDM, kDoS, kUnlabeled };

std::string_view label_name(Label label);  // "normal", "MS", "DM", "DoS", "unlabeled"
std::optional<Label> parse_label(std::string_view text);
inline bool is_attack(Label l) { return l == Label::kMS || l == Label::kDM || l == Label::kDoS; }

// A flow is every frame sharing a GOOSE identity (goID, else gocbRef) and a
// source MAC.
struct FlowKey {
  std::string goose_id;
  MacAddress src_mac{};

  auto operator<=>(const FlowKey&) const = default;
  bool operator==(const FlowKey&) const = default;

  static FlowKey of(const GooseFrame& frame) { return {frame.goose_identity(), frame.src_mac}; }
  // "<goose_id>@<mac>"; parse splits at the last '@'.
  std::string to_string() const;
  static std::optional<FlowKey> parse(std::string_view text);
};

struct WindowConfig {
  double t_w = 1.0;     // seconds
  double stride = 1.0;  // seconds, 0 < stride <= t_w

  void validate() const;  // throws Error(kConfig)
};

struct FlowWindow {
  FlowKey key;
  TimestampUs t_start = 0;
  TimestampUs t_w = 0;
  std::vector<GooseFrame> frames;    // every ts in [t_start, t_start + t_w), sorted
  std::optional<GooseFrame> seed;    // the flow frame just before frames.front()
                                     // (before the window span for empty windows)
  std::vector<double> dt_series;     // seconds; seeded pair first when seed exists
  std::vector<double> jitter_series; // seconds; one per dt that has look-back history
  Label label = Label::kUnlabeled;
};

// Look-back length for the jitter moving median.
inline constexpr std::size_t kJitterLookback = 5;

// Groups frames into flows and cuts each flow into windows starting at
// t0 + k*stride, where t0 is the flow's first timestamp floored to the stride
// grid. Empty windows are emitted only between the first and last frame of a
// flow. Output is ordered by (flow key, t_start).
std::vector<FlowWindow> build_windows(const std::vector<GooseFrame>& frames,
                                      const WindowConfig& config);

struct AttackInterval {
  double start_s = 0.0;
  double end_s = 0.0;  // half-open [start_s, end_s)
  Label kind = Label::kMS;
};

// Assigns kind k to every window with a frame inside a k-interval (or, for
// empty windows, whose span meets one); all other windows become normal.
// Throws Error(kOverlap) when two intervals of one kind overlap.
void label_windows(std::vector<FlowWindow>& windows, const std::vector<AttackInterval>& intervals);

}  // namespace goosead
