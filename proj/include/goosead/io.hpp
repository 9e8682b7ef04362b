#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "goosead/detector.hpp"
#include "goosead/features.hpp"
#include "goosead/pipeline.hpp"
#include "goosead/synth.hpp"

// On-disk artifacts. CSV files start with one or more '#' provenance lines,
// followed by a mandatory header row. Readers skip '#' lines.
namespace goosead::io {

inline constexpr int kFormatVersion = 1;

std::string read_text(const std::string& path);                        // Error(kIo)
void write_text(const std::string& path, const std::string& contents);  // Error(kIo)

// Comma-split with double-quote escaping.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_field(std::string_view text);
// "%.17g"; exact double round trip.
std::string format_double(double v);

// labels.csv: start_s,end_s,kind
std::vector<AttackInterval> read_labels(const std::string& path);
std::string labels_csv(const std::vector<AttackInterval>& labels, const std::string& provenance);

// features.csv: flow,t_start,t_w,label + 14 features in registry order.
// Sidecar <path>.meta.json: {version, columns:[{name, view, degenerate}]}.
std::string features_csv(const FeatureMatrix& m, const std::string& provenance);
std::string features_sidecar(const FeatureMatrix& m);
void write_features(const std::string& path, const FeatureMatrix& m, const std::string& provenance);
// Error(kSchema) on a column mismatch, Error(kFormat) on unparsable cells.
FeatureMatrix read_features(const std::string& path);
std::string sidecar_path(const std::string& features_path);

// Model / profile JSON.
std::string profile_json(const DetectorProfile& p, const RunConfig& config);
DetectorProfile parse_profile(const std::string& text);  // Error(kFormat) / Error(kSchema)
RunConfig parse_profile_config(const std::string& text);

// verdicts.csv: meta, e_seq, e_temp, over_seq, over_temp, anomalous.
std::string verdicts_csv(const std::vector<Verdict>& v, const std::string& provenance);
std::vector<Verdict> read_verdicts(const std::string& path);
// attributions.csv: meta, one column per feature (c_j), then share_<feature>.
std::string attributions_csv(const std::vector<Verdict>& v, const std::string& provenance);

std::string report_csv(const EvalReport& r, const std::string& provenance);
std::string report_table(const EvalReport& r);

// latent.csv: meta, seq_z0.., temp_z0..
std::string latent_csv(const FeatureMatrix& m, const DetectorProfile& p, const std::string& provenance);

// Scenario JSON. Parse errors carry line/column; Error(kConfig).
Scenario parse_scenario(const std::string& text);
std::string scenario_json(const Scenario& s);

}  // namespace goosead::io
