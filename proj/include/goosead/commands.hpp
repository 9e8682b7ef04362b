#pragma once

#include <optional>
#include <string>
#include <vector>

#include "goosead/detector.hpp"
#include "goosead/error.hpp"
#include "goosead/features.hpp"
#include "goosead/pipeline.hpp"

// File-based pipeline stages behind the command-line tool. Each stage reads
// its inputs from disk and writes its outputs with a provenance header.
namespace goosead::cmd {

struct SynthResult {
  std::string pcap_path;
  std::string labels_path;
  std::size_t frames = 0;
  std::size_t intervals = 0;
};

// scenario.json -> <out_dir>/capture.pcap + <out_dir>/labels.csv
SynthResult synth(const std::string& scenario_path, const std::string& out_dir);

// pcap (+ labels.csv) -> features.csv and its sidecar.
FeatureMatrix extract(const std::string& pcap_path, const std::optional<std::string>& labels_path,
                      const WindowConfig& window, Scope scope, const std::string& out_path);

// Window settings recorded in a features file's provenance header, if any.
std::optional<WindowConfig> recorded_window(const std::string& features_path);

// features.csv -> profile.json
DetectorProfile train(const std::string& features_path, RunConfig config, const std::vector<View>& views,
                      const std::string& profile_path);

// profile.json + features.csv -> <out_dir>/verdicts.csv + <out_dir>/attributions.csv
std::vector<Verdict> detect(const std::string& profile_path, const std::string& features_path,
                            const std::string& out_dir);

// verdicts.csv -> report.csv; returns the report.
EvalReport eval(const std::string& verdicts_path, const std::string& report_path);

// profile.json + features.csv -> latent.csv
void latent(const std::string& profile_path, const std::string& features_path, const std::string& out_path);

// Process exit code for an error raised by any stage.
int exit_code(const Error& e);

}  // namespace goosead::cmd
