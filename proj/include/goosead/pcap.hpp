#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "goosead/goose.hpp"

namespace goosead {

enum class TsResolution { kMicro, kNano };

struct CaptureMeta {
  std::string path;
  std::uint32_t link_type = 1;
  TsResolution ts_resolution = TsResolution::kMicro;
  std::uint64_t frame_count = 0;
  std::uint64_t goose_count = 0;
  std::uint64_t malformed_count = 0;
};

struct PcapRecord {
  TimestampUs ts = 0;  // nanosecond captures are floored to microseconds
  std::uint32_t orig_len = 0;
  std::vector<std::uint8_t> data;
};

// Streaming reader for classic libpcap files (both byte orders, µs or ns).
// Holds one record at a time.
class PcapReader {
 public:
  // Throws Error(kIo) if the file cannot be opened, Error(kFormat) for a bad
  // magic number or a link type other than Ethernet.
  explicit PcapReader(const std::string& path);

  // Returns false at clean end of file. Throws Error(kFormat) on a truncated
  // or oversized record.
  bool next(PcapRecord& record);

  const CaptureMeta& meta() const { return meta_; }

 private:
  std::uint32_t u32(const std::uint8_t* p) const;

  std::ifstream in_;
  CaptureMeta meta_;
  bool swapped_ = false;
  std::uint32_t snaplen_ = 0;
};

// Calls `sink` for every decodable GOOSE frame in file order. Non-GOOSE
// frames are counted and skipped; malformed GOOSE frames are counted, logged
// and skipped.
CaptureMeta for_each_goose(const std::string& path,
                           const std::function<void(GooseFrame&&)>& sink);

struct GooseCapture {
  std::vector<GooseFrame> frames;
  CaptureMeta meta;
};

GooseCapture read_goose(const std::string& path);

// Writes a little-endian µs pcap (link type 1, snaplen 65535). Frames must be
// sorted by timestamp (Error(kUnsorted) otherwise).
CaptureMeta write_pcap(const std::vector<GooseFrame>& frames, const std::string& path);

}  // namespace goosead
