#include "goosead/commands.hpp"

#include <filesystem>
#include <json.hpp>

#include "goosead/io.hpp"
#include "goosead/log.hpp"
#include "goosead/pcap.hpp"
#include "goosead/synth.hpp"

namespace goosead::cmd {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create directory " + dir + ": " + ec.message());
}

std::string join_path(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

// First provenance line of a CSV artifact, or "" when it has none.
std::string first_comment(const std::string& text) {
  if (text.empty() || text.front() != '#') return "";
  return text.substr(0, text.find('\n'));
}

}  // namespace

SynthResult synth(const std::string& scenario_path, const std::string& out_dir) {
  const Scenario scenario = io::parse_scenario(io::read_text(scenario_path));
  const SynthOutput out = run_scenario(scenario);
  ensure_dir(out_dir);
  SynthResult r;
  r.pcap_path = join_path(out_dir, "capture.pcap");
  r.labels_path = join_path(out_dir, "labels.csv");
  write_pcap(out.frames, r.pcap_path);
  const std::string provenance = std::string("# goosead ") + kToolVersion +
                                 " scenario_hash=" + fnv1a_hex(io::scenario_json(scenario));
  io::write_text(r.labels_path, io::labels_csv(out.labels, provenance));
  r.frames = out.frames.size();
  r.intervals = out.labels.size();
  log::info("synth: " + std::to_string(r.frames) + " frames, " + std::to_string(r.intervals) +
            " attack intervals");
  return r;
}

FeatureMatrix extract(const std::string& pcap_path, const std::optional<std::string>& labels_path,
                      const WindowConfig& window, Scope scope, const std::string& out_path) {
  window.validate();
  RunConfig config;
  config.window = window;
  std::optional<std::vector<AttackInterval>> labels;
  if (labels_path) labels = io::read_labels(*labels_path);
  const GooseCapture cap = read_goose(pcap_path);
  if (cap.meta.malformed_count > 0) {
    log::warn("extract: skipped " + std::to_string(cap.meta.malformed_count) + " malformed GOOSE frames");
  }
  FeatureMatrix m = features_from_frames(cap.frames, labels, window, scope);
  io::write_features(out_path, m, provenance_line(config));
  log::info("extract: " + std::to_string(cap.frames.size()) + " frames -> " + std::to_string(m.size()) +
            " windows");
  return m;
}

std::optional<WindowConfig> recorded_window(const std::string& features_path) {
  const std::string line = first_comment(io::read_text(features_path));
  const auto pos = line.find(" config=");
  if (pos == std::string::npos) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(line.substr(pos + 8));
    WindowConfig w;
    w.t_w = j.at("t_w").get<double>();
    w.stride = j.at("stride").get<double>();
    return w;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

DetectorProfile train(const std::string& features_path, RunConfig config, const std::vector<View>& views,
                      const std::string& profile_path) {
  if (auto w = recorded_window(features_path)) config.window = *w;
  config.validate();
  const FeatureMatrix x = io::read_features(features_path);
  DetectorProfile p = train_profile(x, config, views);
  io::write_text(profile_path, io::profile_json(p, config));
  for (View v : views) {
    const EvtThreshold& t = p.threshold(v);
    log::info("train: " + std::string(view_name(v)) + " epochs=" + std::to_string(p.model(v).train_meta.epochs) +
              " z*=" + io::format_double(t.z_star));
  }
  return p;
}

std::vector<Verdict> detect(const std::string& profile_path, const std::string& features_path,
                            const std::string& out_dir) {
  const std::string text = io::read_text(profile_path);
  const DetectorProfile p = io::parse_profile(text);
  const std::string provenance = provenance_line(io::parse_profile_config(text));
  const FeatureMatrix x = io::read_features(features_path);
  std::vector<Verdict> v = score(p, x);
  ensure_dir(out_dir);
  io::write_text(join_path(out_dir, "verdicts.csv"), io::verdicts_csv(v, provenance));
  io::write_text(join_path(out_dir, "attributions.csv"), io::attributions_csv(v, provenance));
  return v;
}

EvalReport eval(const std::string& verdicts_path, const std::string& report_path) {
  const std::string provenance = first_comment(io::read_text(verdicts_path));
  const EvalReport r = evaluate_all(io::read_verdicts(verdicts_path));
  io::write_text(report_path, io::report_csv(r, provenance));
  return r;
}

void latent(const std::string& profile_path, const std::string& features_path, const std::string& out_path) {
  const std::string text = io::read_text(profile_path);
  const DetectorProfile p = io::parse_profile(text);
  const FeatureMatrix x = io::read_features(features_path);
  io::write_text(out_path, io::latent_csv(x, p, provenance_line(io::parse_profile_config(text))));
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kConfig:
    case ErrorKind::kOverlap:
    case ErrorKind::kUnsorted:
    case ErrorKind::kFieldOverflow:
      return 2;
    case ErrorKind::kPurity: return 3;
    case ErrorKind::kSchema:
    case ErrorKind::kFormat:
      return 4;
    case ErrorKind::kIo: return 5;
    case ErrorKind::kNumeric: return 1;
  }
  return 1;
}

}  // namespace goosead::cmd
