// goosead: GOOSE traffic synthesis, feature extraction, autoencoder
// training, detection and evaluation.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "goosead/commands.hpp"
#include "goosead/io.hpp"
#include "goosead/log.hpp"

using namespace goosead;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("GOOSEAD_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
    throw Error(ErrorKind::kConfig, "GOOSEAD_SEED must be an unsigned integer");
  }
  return kDefaultSeed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GOOSE anomaly detection with two-view autoencoders and EVT thresholds"};
  app.set_version_flag("--version", std::string("goosead ") + kToolVersion);
  app.require_subcommand(1);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "Progress messages on stderr");
  app.add_flag("-q,--quiet", quiet, "Errors only");

  // synth
  std::string scenario_path, synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a labelled synthetic capture from a scenario");
  synth->add_option("scenario", scenario_path, "Scenario JSON")->required();
  synth->add_option("out_dir", synth_out, "Output directory (capture.pcap, labels.csv)")->required();

  // extract
  std::string pcap_path, features_out, scope_name = "train";
  std::optional<std::string> labels_path;
  double tw = 1.0;
  std::optional<double> stride;
  auto* extract = app.add_subcommand("extract", "Cut a capture into flow windows and extract features");
  extract->add_option("pcap", pcap_path, "Input capture")->required();
  extract->add_option("out", features_out, "Output features CSV")->required();
  extract->add_option("--labels", labels_path, "Attack intervals CSV (start_s,end_s,kind)");
  extract->add_option("--tw", tw, "Window length in seconds")->capture_default_str();
  extract->add_option("--stride", stride, "Window stride in seconds (default: --tw)");
  extract->add_option("--scope", scope_name, "train flags degenerate columns; infer does not")
      ->check(CLI::IsMember({"train", "infer"}))
      ->capture_default_str();

  // train
  RunConfig config;
  std::string train_features, profile_out, view_name_opt = "both";
  std::optional<std::uint64_t> seed;
  auto* train = app.add_subcommand("train", "Train the per-view autoencoders and calibrate thresholds");
  train->add_option("features", train_features, "Normal-traffic features CSV")->required();
  train->add_option("profile", profile_out, "Output profile JSON")->required();
  train->add_option("--view", view_name_opt, "Views to train")
      ->check(CLI::IsMember({"seq", "temp", "both"}))
      ->capture_default_str();
  train->add_option("--seq-dims", config.seq_dims, "Sequence network widths")->delimiter(',');
  train->add_option("--temp-dims", config.temp_dims, "Temporal network widths")->delimiter(',');
  train->add_option("--learning-rate", config.learning_rate, "Adam step size")->capture_default_str();
  train->add_option("--epochs", config.epochs, "Maximum epochs")->capture_default_str();
  train->add_option("--batch", config.batch, "Mini-batch size")->capture_default_str();
  train->add_option("--val-frac", config.val_frac, "Validation fraction")->capture_default_str();
  train->add_option("--patience", config.patience, "Early-stopping patience (epochs)")->capture_default_str();
  train->add_option("--seed", seed, "Seed (default: $GOOSEAD_SEED or built-in)");
  train->add_option("--u-quantile", config.u_quantile, "POT threshold quantile")->capture_default_str();
  train->add_option("--q", config.q, "Target exceedance risk")->capture_default_str();

  // detect
  std::string profile_path, detect_features, detect_out;
  auto* detect = app.add_subcommand("detect", "Score windows and write verdicts and attributions");
  detect->add_option("profile", profile_path, "Profile JSON")->required();
  detect->add_option("features", detect_features, "Features CSV")->required();
  detect->add_option("out_dir", detect_out, "Output directory (verdicts.csv, attributions.csv)")->required();

  // eval
  std::string verdicts_path, report_path;
  auto* eval = app.add_subcommand("eval", "Per-attack metrics from labelled verdicts");
  eval->add_option("verdicts", verdicts_path, "Verdicts CSV")->required();
  eval->add_option("report", report_path, "Output report CSV (default: report.csv next to the verdicts)");

  // latent
  std::string latent_profile, latent_features, latent_out;
  auto* latent = app.add_subcommand("latent", "Bottleneck coordinates of every window per view");
  latent->add_option("profile", latent_profile, "Profile JSON")->required();
  latent->add_option("features", latent_features, "Features CSV")->required();
  latent->add_option("out", latent_out, "Output latent CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  log::set_level(quiet ? log::Level::kError : verbose ? log::Level::kInfo : log::Level::kWarning);

  try {
    if (*synth) {
      const auto r = cmd::synth(scenario_path, synth_out);
      std::printf("%s (%zu frames)\n%s (%zu intervals)\n", r.pcap_path.c_str(), r.frames, r.labels_path.c_str(),
                  r.intervals);
    } else if (*extract) {
      WindowConfig w{tw, stride.value_or(tw)};
      cmd::extract(pcap_path, labels_path, w, scope_name == "train" ? Scope::kTrain : Scope::kInfer, features_out);
    } else if (*train) {
      config.seed = seed ? *seed : default_seed();
      std::vector<View> views;
      if (view_name_opt != "temp") views.push_back(View::kSeq);
      if (view_name_opt != "seq") views.push_back(View::kTemp);
      cmd::train(train_features, config, views, profile_out);
    } else if (*detect) {
      cmd::detect(profile_path, detect_features, detect_out);
    } else if (*eval) {
      if (report_path.empty()) {
        report_path = (std::filesystem::path(verdicts_path).parent_path() / "report.csv").string();
      }
      std::fputs(io::report_table(cmd::eval(verdicts_path, report_path)).c_str(), stdout);
    } else if (*latent) {
      cmd::latent(latent_profile, latent_features, latent_out);
    }
  } catch (const Error& e) {
    log::error(e.what());
    return cmd::exit_code(e);
  } catch (const std::exception& e) {
    log::error(e.what());
    return 1;
  }
  return 0;
}
