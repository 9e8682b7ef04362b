#include "goosead/goose.hpp"

#include <cmath>
#include <cstdio>

#include "goosead/error.hpp"

namespace goosead {

namespace {

// APDU element tags (context-specific, IEC 61850-8-1 IECGoosePdu).
enum Tag : std::uint8_t {
  kApdu = 0x61,
  kGocbRef = 0x80,
  kTimeAllowedToLive = 0x81,
  kDatSet = 0x82,
  kGoId = 0x83,
  kT = 0x84,
  kStNum = 0x85,
  kSqNum = 0x86,
  kTest = 0x87,
  kConfRev = 0x88,
  kNdsCom = 0x89,
  kNumEntries = 0x8A,
  kAllData = 0xAB,
};

// ---------------------------------------------------------------------------
// Encoding

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_length(std::vector<std::uint8_t>& out, std::size_t len) {
  if (len < 0x80) {
    out.push_back(static_cast<std::uint8_t>(len));
  } else if (len <= 0xFF) {
    out.push_back(0x81);
    out.push_back(static_cast<std::uint8_t>(len));
  } else if (len <= 0xFFFF) {
    out.push_back(0x82);
    put_u16(out, static_cast<std::uint16_t>(len));
  } else {
    throw Error(ErrorKind::kFieldOverflow, "BER element longer than 65535 octets");
  }
}

void put_tlv(std::vector<std::uint8_t>& out, std::uint8_t tag,
             std::span<const std::uint8_t> value) {
  out.push_back(tag);
  put_length(out, value.size());
  out.insert(out.end(), value.begin(), value.end());
}

// Minimal two's-complement big-endian content for a non-negative value.
std::vector<std::uint8_t> integer_content(std::uint64_t v) {
  std::vector<std::uint8_t> bytes;
  do {
    bytes.insert(bytes.begin(), static_cast<std::uint8_t>(v & 0xFF));
    v >>= 8;
  } while (v != 0);
  if (bytes.front() & 0x80) bytes.insert(bytes.begin(), 0x00);
  return bytes;
}

void put_unsigned(std::vector<std::uint8_t>& out, std::uint8_t tag, std::uint64_t v) {
  put_tlv(out, tag, integer_content(v));
}

void put_bool(std::vector<std::uint8_t>& out, std::uint8_t tag, bool v) {
  const std::uint8_t b = v ? 0xFF : 0x00;
  put_tlv(out, tag, std::span<const std::uint8_t>(&b, 1));
}

void put_string(std::vector<std::uint8_t>& out, std::uint8_t tag, const std::string& s,
                const char* name) {
  if (s.size() > kMaxGooseString) {
    throw Error(ErrorKind::kFieldOverflow,
                std::string(name) + " exceeds " + std::to_string(kMaxGooseString) + " octets");
  }
  for (unsigned char c : s) {
    if (c > 0x7F) throw Error(ErrorKind::kFieldOverflow, std::string(name) + " is not ASCII");
  }
  put_tlv(out, tag,
          std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()),
                                        s.size()));
}

std::vector<std::uint8_t> encode_apdu(const GooseFrame& f) {
  if (f.go_id.empty() && f.gocb_ref.empty()) {
    throw Error(ErrorKind::kFieldOverflow, "frame needs a goID or gocbRef");
  }
  if (f.ttl_ms == 0) throw Error(ErrorKind::kFieldOverflow, "timeAllowedToLive must be > 0");

  std::vector<std::uint8_t> body;
  put_string(body, kGocbRef, f.gocb_ref, "gocbRef");
  put_unsigned(body, kTimeAllowedToLive, f.ttl_ms);
  put_string(body, kDatSet, f.dat_set, "datSet");
  if (!f.go_id.empty()) put_string(body, kGoId, f.go_id, "goID");
  put_tlv(body, kT, f.event_ts);
  put_unsigned(body, kStNum, f.st_num);
  put_unsigned(body, kSqNum, f.sq_num);
  put_bool(body, kTest, f.test);
  put_unsigned(body, kConfRev, f.conf_rev);
  put_bool(body, kNdsCom, f.nds_com);
  put_unsigned(body, kNumEntries, f.num_entries);
  put_tlv(body, kAllData, f.all_data);

  std::vector<std::uint8_t> apdu;
  apdu.reserve(body.size() + 4);
  put_tlv(apdu, kApdu, body);
  return apdu;
}

// ---------------------------------------------------------------------------
// Decoding

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t remaining() const { return data_.size() - pos_; }
  bool empty() const { return pos_ >= data_.size(); }

  bool u8(std::uint8_t& v) {
    if (remaining() < 1) return false;
    v = data_[pos_++];
    return true;
  }

  bool u16(std::uint16_t& v) {
    if (remaining() < 2) return false;
    v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
    pos_ += 2;
    return true;
  }

  bool take(std::size_t n, std::span<const std::uint8_t>& out) {
    if (remaining() < n) return false;
    out = data_.subspan(pos_, n);
    pos_ += n;
    return true;
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

struct Tlv {
  std::uint32_t tag = 0;  // identifier octets packed big-endian
  std::span<const std::uint8_t> value;
};

// Reads one definite-length TLV. Returns an error string on failure.
const char* read_tlv(Reader& r, Tlv& out) {
  std::uint8_t first;
  if (!r.u8(first)) return "truncated tag";
  std::uint32_t tag = first;
  if ((first & 0x1F) == 0x1F) {
    std::uint8_t b;
    int count = 0;
    do {
      if (!r.u8(b)) return "truncated high tag number";
      if (++count > 3) return "tag number too large";
      tag = (tag << 8) | b;
    } while (b & 0x80);
  }
  std::uint8_t l0;
  if (!r.u8(l0)) return "truncated length";
  std::size_t len = 0;
  if (l0 == 0x80) return "indefinite length not accepted";
  if (l0 & 0x80) {
    const int n = l0 & 0x7F;
    if (n > 4) return "length field too wide";
    for (int i = 0; i < n; ++i) {
      std::uint8_t b;
      if (!r.u8(b)) return "truncated length";
      len = (len << 8) | b;
    }
  } else {
    len = l0;
  }
  if (!r.take(len, out.value)) return "BER length overruns buffer";
  out.tag = tag;
  return nullptr;
}

bool read_unsigned(std::span<const std::uint8_t> v, std::uint32_t& out) {
  if (v.empty() || v.size() > 5) return false;
  if (v[0] & 0x80) return false;  // negative
  std::uint64_t acc = 0;
  for (std::uint8_t b : v) acc = (acc << 8) | b;
  if (acc > UINT32_MAX) return false;
  out = static_cast<std::uint32_t>(acc);
  return true;
}

bool read_bool(std::span<const std::uint8_t> v, bool& out) {
  if (v.size() != 1) return false;
  out = v[0] != 0;
  return true;
}

bool read_string(std::span<const std::uint8_t> v, std::string& out) {
  if (v.size() > kMaxGooseString) return false;
  out.assign(v.begin(), v.end());
  return true;
}

DecodeResult malformed(std::string reason) {
  DecodeResult r;
  r.status = DecodeStatus::kMalformed;
  r.reason = std::move(reason);
  return r;
}

}  // namespace

std::string mac_to_string(const MacAddress& mac) {
  char buf[18];
  std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", mac[0], mac[1], mac[2],
                mac[3], mac[4], mac[5]);
  return buf;
}

std::optional<MacAddress> parse_mac(std::string_view text) {
  if (text.size() != 17) return std::nullopt;
  MacAddress mac{};
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < 6; ++i) {
    const int hi = hex(text[i * 3]);
    const int lo = hex(text[i * 3 + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    if (i < 5 && text[i * 3 + 2] != ':' && text[i * 3 + 2] != '-') return std::nullopt;
    mac[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return mac;
}

TimestampUs from_seconds(double seconds) {
  return static_cast<TimestampUs>(std::llround(seconds * 1e6));
}

std::vector<std::uint8_t> encode_frame(const GooseFrame& f) {
  const std::vector<std::uint8_t> apdu = encode_apdu(f);
  const std::size_t length = 8 + apdu.size();
  if (length > 0xFFFF) throw Error(ErrorKind::kFieldOverflow, "GOOSE PDU exceeds 65535 octets");

  std::vector<std::uint8_t> out;
  out.reserve(22 + apdu.size());
  out.insert(out.end(), f.dst_mac.begin(), f.dst_mac.end());
  out.insert(out.end(), f.src_mac.begin(), f.src_mac.end());
  if (f.vlan) {
    if (f.vlan->pcp > 7 || f.vlan->vid > 4095) {
      throw Error(ErrorKind::kFieldOverflow, "VLAN tag out of range");
    }
    put_u16(out, kVlanEthertype);
    put_u16(out, static_cast<std::uint16_t>((f.vlan->pcp << 13) | f.vlan->vid));
  }
  put_u16(out, kGooseEthertype);
  put_u16(out, f.appid);
  put_u16(out, static_cast<std::uint16_t>(length));
  put_u16(out, 0);
  put_u16(out, 0);
  out.insert(out.end(), apdu.begin(), apdu.end());
  return out;
}

void refresh_lengths(GooseFrame& frame) {
  const std::size_t n = encode_frame(frame).size();
  const std::size_t header = frame.vlan ? 18 : 14;
  frame.frame_len = static_cast<std::uint32_t>(n);
  frame.pdu_len = static_cast<std::uint16_t>(n - header);
}

DecodeResult decode_frame(std::span<const std::uint8_t> bytes, TimestampUs ts) {
  Reader r(bytes);
  GooseFrame f;
  f.ts = ts;
  f.frame_len = static_cast<std::uint32_t>(bytes.size());

  std::span<const std::uint8_t> mac;
  if (!r.take(6, mac)) return malformed("truncated Ethernet header");
  std::copy(mac.begin(), mac.end(), f.dst_mac.begin());
  if (!r.take(6, mac)) return malformed("truncated Ethernet header");
  std::copy(mac.begin(), mac.end(), f.src_mac.begin());

  std::uint16_t ethertype;
  if (!r.u16(ethertype)) return malformed("truncated Ethernet header");
  if (ethertype == kVlanEthertype) {
    std::uint16_t tci;
    if (!r.u16(tci) || !r.u16(ethertype)) return malformed("truncated 802.1Q tag");
    f.vlan = VlanTag{static_cast<std::uint8_t>(tci >> 13), static_cast<std::uint16_t>(tci & 0x0FFF)};
  }
  if (ethertype != kGooseEthertype) {
    DecodeResult nr;
    nr.status = DecodeStatus::kNotGoose;
    return nr;
  }

  std::uint16_t reserved1, reserved2;
  if (!r.u16(f.appid) || !r.u16(f.pdu_len) || !r.u16(reserved1) || !r.u16(reserved2)) {
    return malformed("truncated GOOSE header");
  }
  if (f.pdu_len < 8) return malformed("Length field below header size");
  std::span<const std::uint8_t> pdu_body;
  if (!r.take(f.pdu_len - 8u, pdu_body)) return malformed("Length field overruns frame");

  Reader pr(pdu_body);
  Tlv apdu;
  if (const char* err = read_tlv(pr, apdu)) return malformed(err);
  if (apdu.tag != kApdu) return malformed("APDU tag is not 0x61");

  bool have_st = false, have_sq = false, have_ttl = false, have_ref = false, have_id = false;
  Reader ar(apdu.value);
  while (!ar.empty()) {
    Tlv el;
    if (const char* err = read_tlv(ar, el)) return malformed(err);
    bool ok = true;
    switch (el.tag) {
      case kGocbRef: ok = read_string(el.value, f.gocb_ref); have_ref = ok; break;
      case kTimeAllowedToLive: ok = read_unsigned(el.value, f.ttl_ms) && f.ttl_ms > 0; have_ttl = ok; break;
      case kDatSet: ok = read_string(el.value, f.dat_set); break;
      case kGoId: ok = read_string(el.value, f.go_id); have_id = ok; break;
      case kT:
        ok = el.value.size() == 8;
        if (ok) std::copy(el.value.begin(), el.value.end(), f.event_ts.begin());
        break;
      case kStNum: ok = read_unsigned(el.value, f.st_num); have_st = ok; break;
      case kSqNum: ok = read_unsigned(el.value, f.sq_num); have_sq = ok; break;
      case kTest: ok = read_bool(el.value, f.test); break;
      case kConfRev: ok = read_unsigned(el.value, f.conf_rev); break;
      case kNdsCom: ok = read_bool(el.value, f.nds_com); break;
      case kNumEntries: ok = read_unsigned(el.value, f.num_entries); break;
      case kAllData: f.all_data.assign(el.value.begin(), el.value.end()); break;
      default: break;  // unknown elements are skipped
    }
    if (!ok) {
      char msg[48];
      std::snprintf(msg, sizeof(msg), "bad value for APDU element 0x%02X", el.tag);
      return malformed(msg);
    }
  }
  if (!have_st) return malformed("missing stNum");
  if (!have_sq) return malformed("missing sqNum");
  if (!have_ttl) return malformed("missing timeAllowedToLive");
  if (!(have_id && !f.go_id.empty()) && !(have_ref && !f.gocb_ref.empty())) {
    return malformed("missing goID and gocbRef");
  }

  DecodeResult result;
  result.status = DecodeStatus::kOk;
  result.frame = std::move(f);
  return result;
}

}  // namespace goosead
