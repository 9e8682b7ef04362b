#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "goosead/features.hpp"
#include "goosead/scaler.hpp"

namespace goosead {

enum class Activation { kTanh, kIdentity };
std::string_view activation_name(Activation a);

// Fully connected layer; weights are row-major (out x in).
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  bool operator==(const DenseLayer&) const = default;
};

struct TrainMeta {
  std::uint64_t seed = 0;
  std::size_t epochs = 0;  // epochs actually run
  double learning_rate = 0.0;
  std::size_t batch = 0;
  double val_frac = 0.0;
  double final_loss = 0.0;  // training MSE of the kept weights

  bool operator==(const TrainMeta&) const = default;
};

// One view's autoencoder. dims = {|F_v|, hidden..., d_v, hidden..., |F_v|};
// the hidden activation applies to every layer but the last, whose output is
// linear. The latent code is the activation of the middle layer.
struct AeModel {
  View view = View::kSeq;
  std::vector<std::size_t> dims;
  Activation activation = Activation::kTanh;
  Scaler scaler;
  std::vector<DenseLayer> layers;
  TrainMeta train_meta;

  std::size_t input_width() const { return dims.front(); }
  std::size_t latent_width() const { return dims[dims.size() / 2]; }
  std::size_t parameter_count() const;

  bool operator==(const AeModel&) const = default;
};

std::vector<std::size_t> default_dims(View view);

// Throws Error(kConfig) unless dims has odd length >= 3, non-zero widths and
// matching ends.
void validate_dims(const std::vector<std::size_t>& dims);

// Allocates layers for `dims` with uniform(+-sqrt(6/(fan_in+fan_out))) weights
// and zero biases.
AeModel make_model(View view, std::vector<std::size_t> dims, Activation act, std::uint64_t seed);

struct ForwardResult {
  std::vector<double> output;                    // reconstruction, scaled space
  std::vector<double> latent;                    // bottleneck activation
  std::vector<std::vector<double>> activations;  // [0] = input, [l+1] = layer l output
};

// Runs one scaled input vector through the network.
// Throws Error(kSchema) "DimensionMismatch" on a wrong-width input.
ForwardResult forward(const AeModel& m, std::span<const double> x);

// Mean squared error over the vector length.
double mse(std::span<const double> x, std::span<const double> x_hat);

// Parameter gradients laid out like AeModel::layers.
struct Gradients {
  std::vector<DenseLayer> layers;
};

// Gradient of the mean per-sample MSE over a batch of scaled rows
// (row-major, `rows` given by indices into `data`). Returns the batch loss.
double backprop(const AeModel& m, std::span<const double> data,
                std::span<const std::size_t> rows, Gradients& grads);

struct TrainConfig {
  std::vector<std::size_t> dims;
  Activation activation = Activation::kTanh;
  double learning_rate = 1e-3;
  std::size_t epochs = 500;
  std::size_t batch = 64;
  std::uint64_t seed = 1;
  double val_frac = 0.1;
  std::size_t patience = 20;
};

struct TrainResult {
  AeModel model;
  std::vector<double> train_loss;  // full-pass training MSE after each epoch
  std::vector<double> val_loss;    // empty when no validation rows
};

// Fits a scaler and trains an autoencoder on raw (unscaled) row-major data
// with Adam on MSE. Deterministic for a fixed seed. Stops after `patience`
// epochs without validation improvement and keeps the best weights.
// Throws Error(kNumeric) "Diverged" on a non-finite loss.
TrainResult train(View view, std::span<const double> raw, const TrainConfig& config,
                  const std::vector<bool>& degenerate = {});

// Per-row reconstruction MSE, computed in scaled space.
std::vector<double> reconstruction_errors(const AeModel& m, std::span<const double> raw);

// Per-row latent codes, row-major with latent_width() columns.
std::vector<double> latent(const AeModel& m, std::span<const double> raw);

}  // namespace goosead
