#include "goosead/pcap.hpp"

#include <array>
#include <cstring>

#include "goosead/error.hpp"
#include "goosead/log.hpp"

namespace goosead {

namespace {

constexpr std::uint32_t kMagicMicro = 0xA1B2C3D4;
constexpr std::uint32_t kMagicNano = 0xA1B23C4D;
constexpr std::uint32_t kLinkTypeEthernet = 1;
constexpr std::uint32_t kSnapLen = 65535;
// Upper bound on a record we are willing to allocate, regardless of snaplen.
constexpr std::uint32_t kMaxRecord = 256 * 1024;

std::uint32_t bswap32(std::uint32_t v) {
  return ((v & 0xFF) << 24) | ((v & 0xFF00) << 8) | ((v >> 8) & 0xFF00) | (v >> 24);
}

void put_le32(std::ofstream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                              static_cast<char>((v >> 16) & 0xFF),
                              static_cast<char>((v >> 24) & 0xFF)};
  out.write(b.data(), 4);
}

void put_le16(std::ofstream& out, std::uint16_t v) {
  const std::array<char, 2> b{static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
  out.write(b.data(), 2);
}

}  // namespace

PcapReader::PcapReader(const std::string& path) : in_(path, std::ios::binary) {
  meta_.path = path;
  if (!in_) throw Error(ErrorKind::kIo, "cannot open " + path);

  std::array<std::uint8_t, 24> header{};
  in_.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in_.gcount() != static_cast<std::streamsize>(header.size())) {
    throw Error(ErrorKind::kFormat, path + ": truncated pcap global header");
  }
  std::uint32_t magic;
  std::memcpy(&magic, header.data(), 4);
  // Host is assumed little-endian; the magic tells us whether fields need swapping.
  if (magic == kMagicMicro || magic == kMagicNano) {
    swapped_ = false;
  } else if (bswap32(magic) == kMagicMicro || bswap32(magic) == kMagicNano) {
    swapped_ = true;
    magic = bswap32(magic);
  } else {
    throw Error(ErrorKind::kFormat, path + ": BadMagic (not a classic pcap file)");
  }
  meta_.ts_resolution = magic == kMagicNano ? TsResolution::kNano : TsResolution::kMicro;
  snaplen_ = u32(header.data() + 16);
  meta_.link_type = u32(header.data() + 20);
  if (meta_.link_type != kLinkTypeEthernet) {
    throw Error(ErrorKind::kFormat,
                path + ": BadLinkType " + std::to_string(meta_.link_type) + " (need 1 = Ethernet)");
  }
}

std::uint32_t PcapReader::u32(const std::uint8_t* p) const {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return swapped_ ? bswap32(v) : v;
}

bool PcapReader::next(PcapRecord& record) {
  std::array<std::uint8_t, 16> rh{};
  in_.read(reinterpret_cast<char*>(rh.data()), rh.size());
  const auto got = in_.gcount();
  if (got == 0) return false;
  if (got != static_cast<std::streamsize>(rh.size())) {
    throw Error(ErrorKind::kFormat, meta_.path + ": truncated record header");
  }
  const std::uint32_t sec = u32(rh.data());
  const std::uint32_t frac = u32(rh.data() + 4);
  const std::uint32_t incl = u32(rh.data() + 8);
  record.orig_len = u32(rh.data() + 12);
  if (incl > kMaxRecord) {
    throw Error(ErrorKind::kFormat, meta_.path + ": record length " + std::to_string(incl) +
                                        " exceeds limit");
  }
  const std::int64_t us =
      meta_.ts_resolution == TsResolution::kNano ? frac / 1000 : static_cast<std::int64_t>(frac);
  record.ts = static_cast<TimestampUs>(sec) * 1'000'000 + us;
  record.data.resize(incl);
  in_.read(reinterpret_cast<char*>(record.data.data()), incl);
  if (in_.gcount() != static_cast<std::streamsize>(incl)) {
    throw Error(ErrorKind::kFormat, meta_.path + ": truncated record body");
  }
  ++meta_.frame_count;
  return true;
}

CaptureMeta for_each_goose(const std::string& path,
                           const std::function<void(GooseFrame&&)>& sink) {
  PcapReader reader(path);
  PcapRecord rec;
  std::uint64_t goose = 0, malformed = 0;
  while (reader.next(rec)) {
    DecodeResult r = decode_frame(rec.data, rec.ts);
    switch (r.status) {
      case DecodeStatus::kOk:
        ++goose;
        sink(std::move(r.frame));
        break;
      case DecodeStatus::kMalformed:
        ++malformed;
        log::warn(path + ": dropping malformed GOOSE frame #" +
                  std::to_string(reader.meta().frame_count) + ": " + r.reason);
        break;
      case DecodeStatus::kNotGoose:
        break;
    }
  }
  CaptureMeta meta = reader.meta();
  meta.goose_count = goose;
  meta.malformed_count = malformed;
  return meta;
}

GooseCapture read_goose(const std::string& path) {
  GooseCapture cap;
  cap.meta = for_each_goose(path, [&](GooseFrame&& f) { cap.frames.push_back(std::move(f)); });
  return cap;
}

CaptureMeta write_pcap(const std::vector<GooseFrame>& frames, const std::string& path) {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].ts < frames[i - 1].ts) {
      throw Error(ErrorKind::kUnsorted,
                  "UnsortedInput: frame " + std::to_string(i) + " precedes its predecessor");
    }
  }
  for (const auto& f : frames) {
    if (f.ts < 0 || f.ts / 1'000'000 > UINT32_MAX) {
      throw Error(ErrorKind::kFieldOverflow, "timestamp outside pcap range");
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot create " + path);
  put_le32(out, kMagicMicro);
  put_le16(out, 2);
  put_le16(out, 4);
  put_le32(out, 0);  // thiszone
  put_le32(out, 0);  // sigfigs
  put_le32(out, kSnapLen);
  put_le32(out, kLinkTypeEthernet);

  for (const auto& f : frames) {
    const std::vector<std::uint8_t> bytes = encode_frame(f);
    put_le32(out, static_cast<std::uint32_t>(f.ts / 1'000'000));
    put_le32(out, static_cast<std::uint32_t>(f.ts % 1'000'000));
    put_le32(out, static_cast<std::uint32_t>(bytes.size()));
    put_le32(out, static_cast<std::uint32_t>(bytes.size()));
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);

  CaptureMeta meta;
  meta.path = path;
  meta.frame_count = frames.size();
  meta.goose_count = frames.size();
  return meta;
}

}  // namespace goosead
