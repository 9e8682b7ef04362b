#include "goosead/pipeline.hpp"

#include <cstdio>
#include <json.hpp>

#include "goosead/error.hpp"

namespace goosead {

void RunConfig::validate() const {
  window.validate();
  validate_dims(seq_dims);
  validate_dims(temp_dims);
  if (seq_dims.front() != kNumSeq) {
    throw Error(ErrorKind::kConfig, "seq dims must start and end with " + std::to_string(kNumSeq));
  }
  if (temp_dims.front() != kNumTemp) {
    throw Error(ErrorKind::kConfig, "temp dims must start and end with " + std::to_string(kNumTemp));
  }
  if (!(learning_rate > 0.0) || epochs == 0 || batch == 0 || patience == 0) {
    throw Error(ErrorKind::kConfig, "learning rate, epochs, batch and patience must be positive");
  }
  if (val_frac < 0.0 || val_frac >= 1.0) throw Error(ErrorKind::kConfig, "val_frac must lie in [0, 1)");
  if (!(u_quantile > 0.0 && u_quantile < 1.0)) throw Error(ErrorKind::kConfig, "u_quantile must lie in (0, 1)");
  if (!(q > 0.0 && q < 1.0 - u_quantile)) {
    throw Error(ErrorKind::kConfig, "q must lie in (0, 1 - u_quantile)");
  }
}

TrainConfig RunConfig::train_config(View view) const {
  TrainConfig t;
  t.dims = view == View::kSeq ? seq_dims : temp_dims;
  t.learning_rate = learning_rate;
  t.epochs = epochs;
  t.batch = batch;
  t.seed = view == View::kSeq ? seed : seed + 1;
  t.val_frac = val_frac;
  t.patience = patience;
  return t;
}

std::string config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["t_w"] = c.window.t_w;
  j["stride"] = c.window.stride;
  j["seq_dims"] = c.seq_dims;
  j["temp_dims"] = c.temp_dims;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["batch"] = c.batch;
  j["val_frac"] = c.val_frac;
  j["patience"] = c.patience;
  j["seed"] = c.seed;
  j["u_quantile"] = c.u_quantile;
  j["q"] = c.q;
  return j.dump();
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const RunConfig& c) { return fnv1a_hex(config_json(c)); }

std::string provenance_line(const RunConfig& c) {
  return std::string("# goosead ") + kToolVersion + " config_hash=" + config_hash(c) +
         " config=" + config_json(c);
}

FeatureMatrix features_from_frames(const std::vector<GooseFrame>& frames,
                                   const std::optional<std::vector<AttackInterval>>& labels,
                                   const WindowConfig& window, Scope scope) {
  std::vector<FlowWindow> windows = build_windows(frames, window);
  if (labels) label_windows(windows, *labels);
  return assemble(extract_all(windows), scope);
}

DetectorProfile train_profile(const FeatureMatrix& train, const RunConfig& config,
                              const std::vector<View>& views) {
  config.validate();
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (is_attack(train.meta[i].label)) {
      throw Error(ErrorKind::kPurity, "training input row " + std::to_string(i) + " is labelled " +
                                          std::string(label_name(train.meta[i].label)) +
                                          "; training uses normal traffic only");
    }
  }
  if (train.size() == 0) throw Error(ErrorKind::kNumeric, "EmptyInput: no training rows");

  DetectorProfile profile;
  for (View v : views) {
    const std::size_t off = view_offset(v), width = view_width(v);
    const std::vector<bool> degenerate(train.degenerate.begin() + off,
                                       train.degenerate.begin() + off + width);
    const std::vector<double> slice = train.view_slice(v);
    AeModel model = goosead::train(v, slice, config.train_config(v), degenerate).model;
    EvtThreshold thr = calibrate(reconstruction_errors(model, slice), config.q, config.u_quantile, v);
    if (v == View::kSeq) {
      profile.seq = std::move(model);
      profile.seq_threshold = thr;
    } else {
      profile.temp = std::move(model);
      profile.temp_threshold = thr;
    }
  }
  return profile;
}

}  // namespace goosead
