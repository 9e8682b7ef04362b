#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "goosead/autoencoder.hpp"
#include "goosead/detector.hpp"
#include "goosead/evt.hpp"
#include "goosead/features.hpp"
#include "goosead/windowing.hpp"

namespace goosead {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 20240611;

// Every tunable of a run. Validated before any stage executes and recorded
// in the provenance header of each output.
struct RunConfig {
  WindowConfig window;
  std::vector<std::size_t> seq_dims = default_dims(View::kSeq);
  std::vector<std::size_t> temp_dims = default_dims(View::kTemp);
  double learning_rate = 1e-3;
  std::size_t epochs = 500;
  std::size_t batch = 64;
  double val_frac = 0.1;
  std::size_t patience = 20;
  std::uint64_t seed = kDefaultSeed;
  double u_quantile = kDefaultUQuantile;
  double q = kDefaultRisk;

  void validate() const;  // throws Error(kConfig)
  TrainConfig train_config(View view) const;
};

// FNV-1a 64-bit hash as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

// Canonical single-line JSON of the config and its FNV-1a 64-bit hash.
std::string config_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);
// "# goosead <version> config_hash=<hex> config=<json>"
std::string provenance_line(const RunConfig& config);

// pcap frames (+ optional attack intervals) to an assembled feature matrix.
FeatureMatrix features_from_frames(const std::vector<GooseFrame>& frames,
                                   const std::optional<std::vector<AttackInterval>>& labels,
                                   const WindowConfig& window, Scope scope);

// Trains the requested views on normal-only rows and calibrates their
// thresholds on the training errors. Views not requested stay empty.
// Throws Error(kPurity) if any row carries an attack label.
DetectorProfile train_profile(const FeatureMatrix& train, const RunConfig& config,
                              const std::vector<View>& views = {View::kSeq, View::kTemp});

}  // namespace goosead
