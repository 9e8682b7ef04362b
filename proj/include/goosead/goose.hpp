#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace goosead {

inline constexpr std::uint16_t kGooseEthertype = 0x88B8;
inline constexpr std::uint16_t kVlanEthertype = 0x8100;
inline constexpr std::size_t kMaxGooseString = 65;

using MacAddress = std::array<std::uint8_t, 6>;

std::string mac_to_string(const MacAddress& mac);
// Accepts "aa:bb:cc:dd:ee:ff" (or '-' separated). Returns nullopt on bad input.
std::optional<MacAddress> parse_mac(std::string_view text);
// Group (multicast/broadcast) addresses have the I/G bit set.
inline bool is_group_address(const MacAddress& mac) { return (mac[0] & 0x01) != 0; }

struct VlanTag {
  std::uint8_t pcp = 0;    // 0..7
  std::uint16_t vid = 0;   // 0..4095
  bool operator==(const VlanTag&) const = default;
};

// Microseconds since the epoch. Timestamps stay integral end to end so that
// window membership and pcap round trips are exact.
using TimestampUs = std::int64_t;

inline double to_seconds(TimestampUs ts) { return static_cast<double>(ts) * 1e-6; }
TimestampUs from_seconds(double seconds);

// One decoded GOOSE Ethernet frame.
struct GooseFrame {
  TimestampUs ts = 0;
  MacAddress dst_mac{};
  MacAddress src_mac{};
  std::optional<VlanTag> vlan;
  std::uint16_t appid = 0;
  std::uint16_t pdu_len = 0;  // the GOOSE "Length" field
  std::string gocb_ref;
  std::string dat_set;
  std::string go_id;          // empty when the element is absent on the wire
  std::uint32_t ttl_ms = 0;
  std::array<std::uint8_t, 8> event_ts{};
  std::uint32_t st_num = 0;
  std::uint32_t sq_num = 0;
  bool test = false;
  std::uint32_t conf_rev = 0;
  bool nds_com = false;
  std::uint32_t num_entries = 0;
  std::vector<std::uint8_t> all_data;  // content octets of the allData element
  std::uint32_t frame_len = 0;

  bool operator==(const GooseFrame&) const = default;

  // Identity used for flow grouping: goID, else gocbRef.
  const std::string& goose_identity() const { return go_id.empty() ? gocb_ref : go_id; }
};

enum class DecodeStatus { kOk, kNotGoose, kMalformed };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::kMalformed;
  GooseFrame frame;
  std::string reason;  // set for kMalformed

  bool ok() const { return status == DecodeStatus::kOk; }
};

// Decodes one Ethernet frame starting at the destination MAC. Never reads
// outside `bytes`; every failure is reported through the status.
DecodeResult decode_frame(std::span<const std::uint8_t> bytes, TimestampUs ts);

// Emits dst|src|[802.1Q]|0x88B8|APPID|Length|res1|res2|APDU with a
// recomputed Length. Throws Error(kFieldOverflow) for unencodable fields.
std::vector<std::uint8_t> encode_frame(const GooseFrame& frame);

// Sets pdu_len and frame_len to the values encode_frame would produce.
void refresh_lengths(GooseFrame& frame);

}  // namespace goosead
