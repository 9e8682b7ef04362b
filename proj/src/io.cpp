#include "goosead/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "goosead/error.hpp"

namespace goosead::io {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string format_ts(TimestampUs ts) {
  const bool neg = ts < 0;
  const std::uint64_t a = neg ? static_cast<std::uint64_t>(-ts) : static_cast<std::uint64_t>(ts);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%s%" PRIu64 ".%06" PRIu64, neg ? "-" : "", a / 1'000'000,
                a % 1'000'000);
  return buf;
}

// Exact decimal-seconds parse to microseconds (at most 6 fractional digits
// are significant; extra digits are rounded through double).
TimestampUs parse_ts(const std::string& s) {
  std::size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) neg = s[i++] == '-';
  std::int64_t whole = 0;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    whole = whole * 10 + (s[i++] - '0');
    ++digits;
  }
  std::int64_t frac = 0;
  int frac_digits = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      if (frac_digits < 6) {
        frac = frac * 10 + (s[i] - '0');
        ++frac_digits;
      }
      ++i;
      ++digits;
    }
  }
  if (i != s.size() || digits == 0) {
    // Scientific notation or similar: fall back to a double parse.
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return from_seconds(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kFormat, "bad timestamp '" + s + "'");
    }
  }
  while (frac_digits < 6) {
    frac *= 10;
    ++frac_digits;
  }
  const TimestampUs v = whole * 1'000'000 + frac;
  return neg ? -v : v;
}

double parse_double(const std::string& s) {
  if (s == "nan" || s == "NaN") return std::nan("");
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kFormat, "bad number '" + s + "'");
  }
}

bool parse_bool01(const std::string& s) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw Error(ErrorKind::kFormat, "bad boolean '" + s + "'");
}

// Non-comment, non-empty lines of a CSV file (CR stripped).
std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string join(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  return out;
}

std::vector<std::string> meta_header() { return {"flow", "t_start", "t_w", "label"}; }

std::string meta_cells(const RowMeta& m) {
  return csv_field(m.flow.to_string()) + ',' + format_ts(m.t_start) + ',' + format_ts(m.t_w) + ',' +
         std::string(label_name(m.label));
}

RowMeta parse_meta(const std::vector<std::string>& cells, std::size_t line_no) {
  RowMeta m;
  auto flow = FlowKey::parse(cells[0]);
  if (!flow) throw Error(ErrorKind::kFormat, "line " + std::to_string(line_no) + ": bad flow '" + cells[0] + "'");
  m.flow = *flow;
  m.t_start = parse_ts(cells[1]);
  m.t_w = parse_ts(cells[2]);
  auto label = parse_label(cells[3]);
  if (!label) throw Error(ErrorKind::kFormat, "line " + std::to_string(line_no) + ": bad label '" + cells[3] + "'");
  m.label = *label;
  return m;
}

void expect_header(const std::vector<std::string>& got, const std::vector<std::string>& want,
                   const std::string& what) {
  if (got != want) {
    throw Error(ErrorKind::kSchema, "SchemaMismatch: " + what + " header is '" + join(got) +
                                        "', expected '" + join(want) + "'");
  }
}

template <typename F>
auto guard_json(const std::string& what, ErrorKind kind, F&& f) {
  try {
    return f();
  } catch (const json::parse_error& e) {
    throw Error(kind, what + ": " + e.what());
  } catch (const json::exception& e) {
    throw Error(kind, what + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Model JSON

ordered_json model_to_json(const AeModel& m) {
  ordered_json j;
  j["version"] = kFormatVersion;
  j["view"] = view_name(m.view);
  j["dims"] = m.dims;
  j["activation"] = activation_name(m.activation);
  j["scaler"] = {{"means", m.scaler.means}, {"stds", m.scaler.stds}, {"degenerate", m.scaler.degenerate}};
  ordered_json layers = ordered_json::array();
  for (const auto& l : m.layers) {
    ordered_json rows = ordered_json::array();
    for (std::size_t o = 0; o < l.out; ++o) {
      rows.push_back(std::vector<double>(l.weights.begin() + o * l.in, l.weights.begin() + (o + 1) * l.in));
    }
    layers.push_back({{"weights", rows}, {"bias", l.bias}});
  }
  j["weights"] = layers;
  j["train_meta"] = {{"seed", m.train_meta.seed},
                     {"epochs", m.train_meta.epochs},
                     {"learning_rate", m.train_meta.learning_rate},
                     {"batch", m.train_meta.batch},
                     {"val_frac", m.train_meta.val_frac},
                     {"final_loss", m.train_meta.final_loss}};
  return j;
}

View parse_view(const std::string& s) {
  if (s == "seq") return View::kSeq;
  if (s == "temp") return View::kTemp;
  throw Error(ErrorKind::kFormat, "unknown view '" + s + "'");
}

AeModel model_from_json(const json& j) {
  if (j.at("version").get<int>() != kFormatVersion) {
    throw Error(ErrorKind::kFormat, "unsupported model version");
  }
  AeModel m;
  m.view = parse_view(j.at("view").get<std::string>());
  m.dims = j.at("dims").get<std::vector<std::size_t>>();
  validate_dims(m.dims);
  const std::string act = j.at("activation").get<std::string>();
  if (act == "tanh") m.activation = Activation::kTanh;
  else if (act == "identity") m.activation = Activation::kIdentity;
  else throw Error(ErrorKind::kFormat, "unknown activation '" + act + "'");
  const json& s = j.at("scaler");
  m.scaler.means = s.at("means").get<std::vector<double>>();
  m.scaler.stds = s.at("stds").get<std::vector<double>>();
  m.scaler.degenerate = s.at("degenerate").get<std::vector<bool>>();
  if (m.scaler.means.size() != m.dims.front() || m.scaler.stds.size() != m.dims.front() ||
      m.scaler.degenerate.size() != m.dims.front()) {
    throw Error(ErrorKind::kSchema, "scaler width does not match model dims");
  }
  const json& layers = j.at("weights");
  if (layers.size() + 1 != m.dims.size()) throw Error(ErrorKind::kSchema, "layer count does not match dims");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    DenseLayer d;
    d.in = m.dims[l];
    d.out = m.dims[l + 1];
    const auto rows = layers[l].at("weights").get<std::vector<std::vector<double>>>();
    d.bias = layers[l].at("bias").get<std::vector<double>>();
    if (rows.size() != d.out || d.bias.size() != d.out) throw Error(ErrorKind::kSchema, "layer shape mismatch");
    for (const auto& r : rows) {
      if (r.size() != d.in) throw Error(ErrorKind::kSchema, "layer shape mismatch");
      d.weights.insert(d.weights.end(), r.begin(), r.end());
    }
    m.layers.push_back(std::move(d));
  }
  const json& t = j.at("train_meta");
  m.train_meta.seed = t.at("seed").get<std::uint64_t>();
  m.train_meta.epochs = t.at("epochs").get<std::size_t>();
  m.train_meta.learning_rate = t.at("learning_rate").get<double>();
  m.train_meta.batch = t.at("batch").get<std::size_t>();
  m.train_meta.val_frac = t.at("val_frac").get<double>();
  m.train_meta.final_loss = t.at("final_loss").get<double>();
  return m;
}

ordered_json threshold_to_json(const EvtThreshold& t) {
  ordered_json j;
  j["view"] = view_name(t.view);
  j["u"] = t.u;
  j["xi"] = t.xi;
  j["sigma"] = t.sigma;
  j["n"] = t.n;
  j["n_u"] = t.n_u;
  j["q"] = t.q;
  j["u_quantile"] = t.u_quantile;
  j["z_star"] = t.z_star;
  return j;
}

EvtThreshold threshold_from_json(const json& j) {
  EvtThreshold t;
  t.view = parse_view(j.at("view").get<std::string>());
  t.u = j.at("u").get<double>();
  t.xi = j.at("xi").get<double>();
  t.sigma = j.at("sigma").get<double>();
  t.n = j.at("n").get<std::size_t>();
  t.n_u = j.at("n_u").get<std::size_t>();
  t.q = j.at("q").get<double>();
  t.u_quantile = j.at("u_quantile").get<double>();
  t.z_star = j.at("z_star").get<double>();
  return t;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.window.t_w = j.at("t_w").get<double>();
  c.window.stride = j.at("stride").get<double>();
  c.seq_dims = j.at("seq_dims").get<std::vector<std::size_t>>();
  c.temp_dims = j.at("temp_dims").get<std::vector<std::size_t>>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch = j.at("batch").get<std::size_t>();
  c.val_frac = j.at("val_frac").get<double>();
  c.patience = j.at("patience").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.u_quantile = j.at("u_quantile").get<double>();
  c.q = j.at("q").get<double>();
  return c;
}

// ---------------------------------------------------------------------------
// Scenario JSON

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::kConfig, where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw Error(ErrorKind::kConfig, where + ": unknown key '" + key + "'");
  }
}

MacAddress mac_field(const json& j, const char* key, MacAddress fallback) {
  if (!j.contains(key)) return fallback;
  auto mac = parse_mac(j.at(key).get<std::string>());
  if (!mac) throw Error(ErrorKind::kConfig, std::string("bad MAC address in '") + key + "'");
  return *mac;
}

PublisherSpec publisher_from_json(const json& j, std::size_t index) {
  const std::string where = "publishers[" + std::to_string(index) + "]";
  check_keys(j, {"go_id", "gocb_ref", "dat_set", "src_mac", "dst_mac", "appid", "vlan", "t_min_ms",
                 "t_max_ms", "ttl_factor", "event_rate", "frame_len_base", "num_entries", "conf_rev",
                 "initial_st_num", "initial_sq_num", "jitter_frac", "seed"},
             where);
  PublisherSpec p;
  p.go_id = j.value("go_id", std::string());
  p.gocb_ref = j.value("gocb_ref", p.go_id.empty() ? std::string() : p.go_id + "/LLN0$GO$gcb");
  p.dat_set = j.value("dat_set", p.go_id.empty() ? std::string() : p.go_id + "/LLN0$DataSet");
  p.src_mac = mac_field(j, "src_mac", {0x00, 0x1A, 0xB6, 0x00, 0x00, static_cast<std::uint8_t>(index + 1)});
  p.dst_mac = mac_field(j, "dst_mac", {0x01, 0x0C, 0xCD, 0x01, 0x00, static_cast<std::uint8_t>(index + 1)});
  p.appid = j.value("appid", static_cast<std::uint16_t>(index + 1));
  if (j.contains("vlan")) {
    VlanTag v;
    v.pcp = j.at("vlan").value("pcp", std::uint8_t{4});
    v.vid = j.at("vlan").value("vid", std::uint16_t{0});
    if (v.pcp > 7 || v.vid > 4095) throw Error(ErrorKind::kConfig, where + ": VLAN out of range");
    p.vlan = v;
  }
  p.t_min_ms = j.value("t_min_ms", p.t_min_ms);
  p.t_max_ms = j.value("t_max_ms", p.t_max_ms);
  p.ttl_factor = j.value("ttl_factor", p.ttl_factor);
  p.event_rate = j.value("event_rate", p.event_rate);
  p.frame_len_base = j.value("frame_len_base", p.frame_len_base);
  p.num_entries = j.value("num_entries", p.num_entries);
  p.conf_rev = j.value("conf_rev", p.conf_rev);
  p.initial_st_num = j.value("initial_st_num", p.initial_st_num);
  p.initial_sq_num = j.value("initial_sq_num", p.initial_sq_num);
  p.jitter_frac = j.value("jitter_frac", p.jitter_frac);
  p.seed = j.value("seed", std::uint64_t{0});
  p.validate();
  return p;
}

AttackSpec attack_from_json(const json& j, std::size_t index) {
  const std::string where = "attacks[" + std::to_string(index) + "]";
  check_keys(j, {"kind", "start_s", "duration_s", "victim", "drop_fraction", "st_delta", "unicast_dst",
                 "mutate_payload", "forged_t_min_ms", "forged_t_max_ms", "flood_rate", "spoof_src",
                 "attacker_mac", "seed"},
             where);
  AttackSpec a;
  const auto kind = parse_label(j.at("kind").get<std::string>());
  if (!kind || !is_attack(*kind)) throw Error(ErrorKind::kConfig, where + ": kind must be MS, DM or DoS");
  a.kind = *kind;
  a.start_s = j.at("start_s").get<double>();
  a.duration_s = j.at("duration_s").get<double>();
  a.victim = j.value("victim", std::string());
  a.drop_fraction = j.value("drop_fraction", a.drop_fraction);
  a.st_delta = j.value("st_delta", a.st_delta);
  a.unicast_dst = j.value("unicast_dst", a.unicast_dst);
  a.mutate_payload = j.value("mutate_payload", a.mutate_payload);
  a.forged_t_min_ms = j.value("forged_t_min_ms", a.forged_t_min_ms);
  a.forged_t_max_ms = j.value("forged_t_max_ms", a.forged_t_max_ms);
  a.flood_rate = j.value("flood_rate", a.flood_rate);
  a.spoof_src = j.value("spoof_src", a.spoof_src);
  a.attacker_mac = mac_field(j, "attacker_mac", a.attacker_mac);
  a.seed = j.value("seed", std::uint64_t{0});
  return a;
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::kIo, "read failed for " + path);
  return ss.str();
}

void write_text(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot create " + path);
  out << contents;
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------

std::vector<AttackInterval> read_labels(const std::string& path) {
  const auto lines = data_lines(read_text(path));
  if (lines.empty()) throw Error(ErrorKind::kFormat, path + ": missing header row");
  expect_header(split_csv_line(lines[0]), {"start_s", "end_s", "kind"}, path);
  std::vector<AttackInterval> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != 3) throw Error(ErrorKind::kFormat, path + ": expected 3 columns");
    AttackInterval iv;
    iv.start_s = parse_double(cells[0]);
    iv.end_s = parse_double(cells[1]);
    const auto kind = parse_label(cells[2]);
    if (!kind || !is_attack(*kind)) throw Error(ErrorKind::kFormat, path + ": bad kind '" + cells[2] + "'");
    iv.kind = *kind;
    if (iv.end_s < iv.start_s) throw Error(ErrorKind::kFormat, path + ": interval ends before it starts");
    out.push_back(iv);
  }
  return out;
}

std::string labels_csv(const std::vector<AttackInterval>& labels, const std::string& provenance) {
  std::string out = provenance.empty() ? "" : provenance + "\n";
  out += "start_s,end_s,kind\n";
  char buf[96];
  for (const auto& l : labels) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,", l.start_s, l.end_s);
    out += buf;
    out += label_name(l.kind);
    out += '\n';
  }
  return out;
}

std::string features_csv(const FeatureMatrix& m, const std::string& provenance) {
  std::vector<std::string> header = meta_header();
  for (const auto& c : kFeatureColumns) header.emplace_back(c.name);
  std::string out = provenance.empty() ? "" : provenance + "\n";
  out += join(header) + '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += meta_cells(m.meta[i]);
    for (double v : m.rows[i]) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

std::string features_sidecar(const FeatureMatrix& m) {
  ordered_json j;
  j["version"] = kFormatVersion;
  ordered_json cols = ordered_json::array();
  for (std::size_t c = 0; c < kNumFeatures; ++c) {
    cols.push_back({{"name", kFeatureColumns[c].name},
                    {"view", view_name(kFeatureColumns[c].view)},
                    {"continuous", kFeatureColumns[c].continuous},
                    {"degenerate", static_cast<bool>(m.degenerate[c])}});
  }
  j["columns"] = cols;
  return j.dump(2) + "\n";
}

std::string sidecar_path(const std::string& features_path) { return features_path + ".meta.json"; }

void write_features(const std::string& path, const FeatureMatrix& m, const std::string& provenance) {
  write_text(path, features_csv(m, provenance));
  write_text(sidecar_path(path), features_sidecar(m));
}

FeatureMatrix read_features(const std::string& path) {
  const auto lines = data_lines(read_text(path));
  if (lines.empty()) throw Error(ErrorKind::kSchema, "SchemaMismatch: " + path + " has no header row");
  std::vector<std::string> want = meta_header();
  for (const auto& c : kFeatureColumns) want.emplace_back(c.name);
  expect_header(split_csv_line(lines[0]), want, path);

  FeatureMatrix m;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != want.size()) {
      throw Error(ErrorKind::kSchema, "SchemaMismatch: " + path + " row " + std::to_string(i) +
                                          " has " + std::to_string(cells.size()) + " cells");
    }
    m.meta.push_back(parse_meta(cells, i + 1));
    FeatureRow row;
    for (std::size_t c = 0; c < kNumFeatures; ++c) row[c] = parse_double(cells[4 + c]);
    m.rows.push_back(row);
  }

  std::ifstream side(sidecar_path(path));
  if (side) {
    const json j = guard_json(sidecar_path(path), ErrorKind::kFormat, [&] { return json::parse(side); });
    guard_json(sidecar_path(path), ErrorKind::kFormat, [&] {
      const json& cols = j.at("columns");
      if (cols.size() != kNumFeatures) throw Error(ErrorKind::kSchema, "SchemaMismatch: sidecar column count");
      for (std::size_t c = 0; c < kNumFeatures; ++c) {
        if (cols[c].at("name").get<std::string>() != kFeatureColumns[c].name) {
          throw Error(ErrorKind::kSchema, "SchemaMismatch: sidecar column order");
        }
        m.degenerate[c] = cols[c].at("degenerate").get<bool>();
      }
      return 0;
    });
  }
  return m;
}

std::string profile_json(const DetectorProfile& p, const RunConfig& config) {
  ordered_json j;
  j["version"] = kFormatVersion;
  j["tool"] = std::string("goosead ") + kToolVersion;
  j["config_hash"] = config_hash(config);
  j["config"] = ordered_json::parse(config_json(config));
  j["models"] = ordered_json::object();
  j["thresholds"] = ordered_json::object();
  for (View v : {View::kSeq, View::kTemp}) {
    if (!p.has(v)) continue;
    const std::string name(view_name(v));
    j["models"][name] = model_to_json(p.model(v));
    j["thresholds"][name] = threshold_to_json(p.threshold(v));
  }
  return j.dump(1) + "\n";
}

DetectorProfile parse_profile(const std::string& text) {
  return guard_json("profile", ErrorKind::kFormat, [&] {
    const json j = json::parse(text);
    if (j.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorKind::kFormat, "unsupported profile version");
    }
    DetectorProfile p;
    const json& models = j.at("models");
    const json& thresholds = j.at("thresholds");
    if (models.empty()) throw Error(ErrorKind::kFormat, "profile holds no models");
    if (models.contains("seq")) {
      p.seq = model_from_json(models.at("seq"));
      p.seq_threshold = threshold_from_json(thresholds.at("seq"));
    }
    if (models.contains("temp")) {
      p.temp = model_from_json(models.at("temp"));
      p.temp_threshold = threshold_from_json(thresholds.at("temp"));
    }
    if ((p.has(View::kSeq) && p.seq.view != View::kSeq) || (p.has(View::kTemp) && p.temp.view != View::kTemp)) {
      throw Error(ErrorKind::kSchema, "profile models are attached to the wrong views");
    }
    return p;
  });
}

RunConfig parse_profile_config(const std::string& text) {
  return guard_json("profile", ErrorKind::kFormat, [&] { return config_from_json(json::parse(text).at("config")); });
}

std::string verdicts_csv(const std::vector<Verdict>& v, const std::string& provenance) {
  std::vector<std::string> header = meta_header();
  for (const char* h : {"e_seq", "e_temp", "over_seq", "over_temp", "anomalous"}) header.emplace_back(h);
  std::string out = provenance.empty() ? "" : provenance + "\n";
  out += join(header) + '\n';
  for (const auto& r : v) {
    out += meta_cells(r.meta) + ',' + format_double(r.e_seq) + ',' + format_double(r.e_temp) + ',' +
           (r.over_seq ? "1" : "0") + ',' + (r.over_temp ? "1" : "0") + ',' + (r.anomalous ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<Verdict> read_verdicts(const std::string& path) {
  const auto lines = data_lines(read_text(path));
  if (lines.empty()) throw Error(ErrorKind::kSchema, "SchemaMismatch: " + path + " has no header row");
  std::vector<std::string> want = meta_header();
  for (const char* h : {"e_seq", "e_temp", "over_seq", "over_temp", "anomalous"}) want.emplace_back(h);
  expect_header(split_csv_line(lines[0]), want, path);
  std::vector<Verdict> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != want.size()) throw Error(ErrorKind::kSchema, "SchemaMismatch: " + path + " row width");
    Verdict v;
    v.meta = parse_meta(cells, i + 1);
    v.e_seq = parse_double(cells[4]);
    v.e_temp = parse_double(cells[5]);
    v.over_seq = parse_bool01(cells[6]);
    v.over_temp = parse_bool01(cells[7]);
    v.anomalous = parse_bool01(cells[8]);
    out.push_back(v);
  }
  return out;
}

std::string attributions_csv(const std::vector<Verdict>& v, const std::string& provenance) {
  std::vector<std::string> header = meta_header();
  for (const auto& c : kFeatureColumns) header.emplace_back(c.name);
  for (const auto& c : kFeatureColumns) header.push_back("share_" + std::string(c.name));
  std::string out = provenance.empty() ? "" : provenance + "\n";
  out += join(header) + '\n';
  for (const auto& r : v) {
    out += meta_cells(r.meta);
    for (double c : r.contribution) out += ',' + format_double(c);
    for (double s : r.share) out += ',' + format_double(s);
    out += '\n';
  }
  return out;
}

std::string report_csv(const EvalReport& r, const std::string& provenance) {
  std::string out = provenance.empty() ? "" : provenance + "\n";
  out += "kind,view,tp,fp,tn,fn,recall,specificity,precision,f1,no_positives,"
         "total_windows,normal_windows,fp_share_total,fp_rate_normal\n";
  for (const auto& row : r.rows) {
    out += std::string(label_name(row.kind)) + ',' + std::string(eval_view_name(row.view)) + ',' +
           std::to_string(row.tp) + ',' + std::to_string(row.fp) + ',' + std::to_string(row.tn) + ',' +
           std::to_string(row.fn) + ',' + format_double(row.recall) + ',' + format_double(row.specificity) +
           ',' + format_double(row.precision) + ',' + format_double(row.f1) + ',' +
           (row.no_positives ? "1" : "0") + ",,,,\n";
  }
  out += "fp_share,fused,," + std::to_string(r.fused_false_positives) + ",,,,,,,," +
         std::to_string(r.total_windows) + ',' + std::to_string(r.normal_windows) + ',' +
         format_double(r.fp_share_total) + ',' + format_double(r.fp_rate_normal) + '\n';
  return out;
}

std::string report_table(const EvalReport& r) {
  std::string out;
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%-5s %-6s %7s %7s %9s %7s %9s %9s %9s %9s\n", "kind", "view", "TP", "FP",
                "TN", "FN", "recall", "spec", "prec", "F1");
  out += buf;
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof(buf), "%-5s %-6s %7zu %7zu %9zu %7zu %9.5f %9.5f %9.5f %9.5f%s\n",
                  std::string(label_name(row.kind)).c_str(), std::string(eval_view_name(row.view)).c_str(),
                  row.tp, row.fp, row.tn, row.fn, row.recall, row.specificity, row.precision, row.f1,
                  row.no_positives ? "  NoPositives" : "");
    out += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "fused false positives: %zu of %zu windows (%.3f%% of all, %.3f%% of %zu normal)\n",
                r.fused_false_positives, r.total_windows, 100.0 * r.fp_share_total, 100.0 * r.fp_rate_normal,
                r.normal_windows);
  out += buf;
  return out;
}

std::string latent_csv(const FeatureMatrix& m, const DetectorProfile& p, const std::string& provenance) {
  std::vector<std::string> header = meta_header();
  const std::size_t ds = p.has(View::kSeq) ? p.seq.latent_width() : 0;
  const std::size_t dt = p.has(View::kTemp) ? p.temp.latent_width() : 0;
  for (std::size_t i = 0; i < ds; ++i) header.push_back("seq_z" + std::to_string(i));
  for (std::size_t i = 0; i < dt; ++i) header.push_back("temp_z" + std::to_string(i));
  const std::vector<double> zs = ds ? latent(p.seq, m.view_slice(View::kSeq)) : std::vector<double>{};
  const std::vector<double> zt = dt ? latent(p.temp, m.view_slice(View::kTemp)) : std::vector<double>{};
  std::string out = provenance.empty() ? "" : provenance + "\n";
  out += join(header) + '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += meta_cells(m.meta[i]);
    for (std::size_t k = 0; k < ds; ++k) out += ',' + format_double(zs[i * ds + k]);
    for (std::size_t k = 0; k < dt; ++k) out += ',' + format_double(zt[i * dt + k]);
    out += '\n';
  }
  return out;
}

Scenario parse_scenario(const std::string& text) {
  return guard_json("scenario", ErrorKind::kConfig, [&] {
    const json j = json::parse(text);
    check_keys(j, {"version", "seed", "span_s", "start_epoch_s", "publishers", "attacks"}, "scenario");
    Scenario s;
    s.version = j.value("version", 1);
    if (s.version != kFormatVersion) throw Error(ErrorKind::kConfig, "unsupported scenario version");
    s.seed = j.value("seed", s.seed);
    s.span_s = j.at("span_s").get<double>();
    s.start_epoch_s = j.value("start_epoch_s", s.start_epoch_s);
    if (!(s.span_s > 0.0)) throw Error(ErrorKind::kConfig, "scenario span_s must be > 0");
    const json& pubs = j.at("publishers");
    for (std::size_t i = 0; i < pubs.size(); ++i) s.publishers.push_back(publisher_from_json(pubs[i], i));
    if (j.contains("attacks")) {
      const json& atk = j.at("attacks");
      for (std::size_t i = 0; i < atk.size(); ++i) s.attacks.push_back(attack_from_json(atk[i], i));
    }
    return s;
  });
}

std::string scenario_json(const Scenario& s) {
  ordered_json j;
  j["version"] = s.version;
  j["seed"] = s.seed;
  j["span_s"] = s.span_s;
  j["start_epoch_s"] = s.start_epoch_s;
  ordered_json pubs = ordered_json::array();
  for (const auto& p : s.publishers) {
    ordered_json pj;
    pj["go_id"] = p.go_id;
    pj["gocb_ref"] = p.gocb_ref;
    pj["dat_set"] = p.dat_set;
    pj["src_mac"] = mac_to_string(p.src_mac);
    pj["dst_mac"] = mac_to_string(p.dst_mac);
    pj["appid"] = p.appid;
    if (p.vlan) pj["vlan"] = {{"pcp", p.vlan->pcp}, {"vid", p.vlan->vid}};
    pj["t_min_ms"] = p.t_min_ms;
    pj["t_max_ms"] = p.t_max_ms;
    pj["ttl_factor"] = p.ttl_factor;
    pj["event_rate"] = p.event_rate;
    pj["frame_len_base"] = p.frame_len_base;
    pj["num_entries"] = p.num_entries;
    pj["conf_rev"] = p.conf_rev;
    pj["initial_st_num"] = p.initial_st_num;
    pj["initial_sq_num"] = p.initial_sq_num;
    pj["jitter_frac"] = p.jitter_frac;
    pj["seed"] = p.seed;
    pubs.push_back(pj);
  }
  j["publishers"] = pubs;
  ordered_json atk = ordered_json::array();
  for (const auto& a : s.attacks) {
    ordered_json aj;
    aj["kind"] = label_name(a.kind);
    aj["start_s"] = a.start_s;
    aj["duration_s"] = a.duration_s;
    aj["victim"] = a.victim;
    aj["drop_fraction"] = a.drop_fraction;
    aj["st_delta"] = a.st_delta;
    aj["unicast_dst"] = a.unicast_dst;
    aj["mutate_payload"] = a.mutate_payload;
    aj["forged_t_min_ms"] = a.forged_t_min_ms;
    aj["forged_t_max_ms"] = a.forged_t_max_ms;
    aj["flood_rate"] = a.flood_rate;
    aj["spoof_src"] = a.spoof_src;
    aj["attacker_mac"] = mac_to_string(a.attacker_mac);
    aj["seed"] = a.seed;
    atk.push_back(aj);
  }
  j["attacks"] = atk;
  return j.dump(2) + "\n";
}

}  // namespace goosead::io
