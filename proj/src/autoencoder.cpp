#include "goosead/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "goosead/error.hpp"
#include "goosead/log.hpp"
#include "goosead/rng.hpp"

namespace goosead {

namespace {

double activate(Activation a, double z) { return a == Activation::kTanh ? std::tanh(z) : z; }

// Derivative expressed through the activation output y = f(z).
double activate_grad(Activation a, double y) { return a == Activation::kTanh ? 1.0 - y * y : 1.0; }

void zero_like(const AeModel& m, Gradients& g) {
  g.layers.resize(m.layers.size());
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    g.layers[l].in = m.layers[l].in;
    g.layers[l].out = m.layers[l].out;
    g.layers[l].weights.assign(m.layers[l].weights.size(), 0.0);
    g.layers[l].bias.assign(m.layers[l].bias.size(), 0.0);
  }
}

struct AdamState {
  std::vector<DenseLayer> m, v;
  std::size_t t = 0;
};

void adam_step(AeModel& model, const Gradients& g, AdamState& st, double lr) {
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  ++st.t;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(st.t));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(st.t));
  auto update = [&](std::vector<double>& p, const std::vector<double>& grad, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEps);
    }
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    update(model.layers[l].weights, g.layers[l].weights, st.m[l].weights, st.v[l].weights);
    update(model.layers[l].bias, g.layers[l].bias, st.m[l].bias, st.v[l].bias);
  }
}

double mean_loss(const AeModel& m, std::span<const double> scaled, std::span<const std::size_t> rows) {
  const std::size_t w = m.input_width();
  double total = 0.0;
  for (std::size_t r : rows) {
    const auto x = scaled.subspan(r * w, w);
    total += mse(x, forward(m, x).output);
  }
  return rows.empty() ? 0.0 : total / static_cast<double>(rows.size());
}

}  // namespace

std::string_view activation_name(Activation a) { return a == Activation::kTanh ? "tanh" : "identity"; }

std::size_t AeModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<std::size_t> default_dims(View view) {
  if (view == View::kSeq) return {6, 16, 8, 3, 8, 16, 6};
  return {8, 8, 2, 8, 8};
}

void validate_dims(const std::vector<std::size_t>& dims) {
  if (dims.size() < 3 || dims.size() % 2 == 0) {
    throw Error(ErrorKind::kConfig, "autoencoder dims need an odd number (>= 3) of widths");
  }
  if (dims.front() != dims.back()) {
    throw Error(ErrorKind::kConfig, "autoencoder input and output widths differ");
  }
  if (std::find(dims.begin(), dims.end(), 0u) != dims.end()) {
    throw Error(ErrorKind::kConfig, "autoencoder widths must be positive");
  }
}

AeModel make_model(View view, std::vector<std::size_t> dims, Activation act, std::uint64_t seed) {
  validate_dims(dims);
  AeModel m;
  m.view = view;
  m.dims = std::move(dims);
  m.activation = act;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < m.dims.size(); ++l) {
    DenseLayer layer;
    layer.in = m.dims[l];
    layer.out = m.dims[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    layer.weights.resize(layer.in * layer.out);
    for (auto& w : layer.weights) w = rng.uniform(-limit, limit);
    layer.bias.assign(layer.out, 0.0);
    m.layers.push_back(std::move(layer));
  }
  return m;
}

ForwardResult forward(const AeModel& m, std::span<const double> x) {
  if (x.size() != m.input_width()) {
    throw Error(ErrorKind::kSchema, "DimensionMismatch: expected " +
                                        std::to_string(m.input_width()) + " inputs, got " +
                                        std::to_string(x.size()));
  }
  ForwardResult r;
  r.activations.reserve(m.layers.size() + 1);
  r.activations.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const DenseLayer& layer = m.layers[l];
    const std::vector<double>& a = r.activations.back();
    const bool last = l + 1 == m.layers.size();
    std::vector<double> next(layer.out);
    for (std::size_t o = 0; o < layer.out; ++o) {
      double z = layer.bias[o];
      const double* w = &layer.weights[o * layer.in];
      for (std::size_t i = 0; i < layer.in; ++i) z += w[i] * a[i];
      next[o] = last ? z : activate(m.activation, z);
    }
    r.activations.push_back(std::move(next));
  }
  r.output = r.activations.back();
  r.latent = r.activations[m.dims.size() / 2];
  return r;
}

double mse(std::span<const double> x, std::span<const double> x_hat) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - x_hat[j]) * (x[j] - x_hat[j]);
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double backprop(const AeModel& m, std::span<const double> data, std::span<const std::size_t> rows,
                Gradients& grads) {
  zero_like(m, grads);
  const std::size_t width = m.input_width();
  const std::size_t nl = m.layers.size();
  double loss = 0.0;
  std::vector<double> delta, prev_delta;
  for (std::size_t r : rows) {
    const auto x = data.subspan(r * width, width);
    const ForwardResult fw = forward(m, x);
    loss += mse(x, fw.output);

    delta.assign(width, 0.0);
    for (std::size_t j = 0; j < width; ++j) {
      delta[j] = 2.0 * (fw.output[j] - x[j]) / static_cast<double>(width);
    }
    for (std::size_t l = nl; l-- > 0;) {
      const DenseLayer& layer = m.layers[l];
      const std::vector<double>& a = fw.activations[l];
      DenseLayer& g = grads.layers[l];
      for (std::size_t o = 0; o < layer.out; ++o) {
        g.bias[o] += delta[o];
        double* gw = &g.weights[o * layer.in];
        for (std::size_t i = 0; i < layer.in; ++i) gw[i] += delta[o] * a[i];
      }
      if (l == 0) break;
      prev_delta.assign(layer.in, 0.0);
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double* w = &layer.weights[o * layer.in];
        for (std::size_t i = 0; i < layer.in; ++i) prev_delta[i] += w[i] * delta[o];
      }
      for (std::size_t i = 0; i < layer.in; ++i) {
        prev_delta[i] *= activate_grad(m.activation, a[i]);
      }
      std::swap(delta, prev_delta);
    }
  }
  const double inv = rows.empty() ? 0.0 : 1.0 / static_cast<double>(rows.size());
  for (auto& g : grads.layers) {
    for (auto& v : g.weights) v *= inv;
    for (auto& v : g.bias) v *= inv;
  }
  return loss * inv;
}

TrainResult train(View view, std::span<const double> raw, const TrainConfig& config,
                  const std::vector<bool>& degenerate) {
  std::vector<std::size_t> dims = config.dims.empty() ? default_dims(view) : config.dims;
  validate_dims(dims);
  const std::size_t width = dims.front();
  if (raw.empty() || raw.size() % width != 0) {
    throw Error(ErrorKind::kNumeric, "EmptyInput: no training rows for the " +
                                         std::string(view_name(view)) + " view");
  }
  if (config.batch == 0 || config.epochs == 0 || !(config.learning_rate > 0.0)) {
    throw Error(ErrorKind::kConfig, "batch, epochs and learning rate must be positive");
  }
  if (config.val_frac < 0.0 || config.val_frac >= 1.0) {
    throw Error(ErrorKind::kConfig, "validation fraction must lie in [0, 1)");
  }
  const std::size_t n = raw.size() / width;

  TrainResult result;
  AeModel& model = result.model;
  model = make_model(view, dims, config.activation, config.seed);
  model.scaler = fit_scaler(raw, width, degenerate);
  if (n < model.parameter_count()) {
    log::warn(std::string(view_name(view)) + " view: " + std::to_string(n) +
              " training rows for " + std::to_string(model.parameter_count()) + " parameters");
  }
  const std::vector<double> scaled = scale(model.scaler, raw);

  // The weight initialisation consumed the seed's first stream; shuffling
  // uses a derived one.
  Rng rng(config.seed ^ 0x9E3779B97F4A7C15ull);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  const std::size_t n_val = static_cast<std::size_t>(std::floor(config.val_frac * static_cast<double>(n)));
  std::vector<std::size_t> val(idx.begin(), idx.begin() + n_val);
  std::vector<std::size_t> trn(idx.begin() + n_val, idx.end());
  std::sort(val.begin(), val.end());

  AdamState adam;
  Gradients grads;
  zero_like(model, grads);
  adam.m = grads.layers;
  adam.v = grads.layers;

  AeModel best = model;
  double best_score = std::numeric_limits<double>::infinity();
  double best_train = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::size_t epoch = 0;
  for (; epoch < config.epochs; ++epoch) {
    rng.shuffle(trn);
    for (std::size_t b = 0; b < trn.size(); b += config.batch) {
      const std::size_t e = std::min(trn.size(), b + config.batch);
      const double batch_loss =
          backprop(model, scaled, std::span<const std::size_t>(trn).subspan(b, e - b), grads);
      if (!std::isfinite(batch_loss)) {
        throw Error(ErrorKind::kNumeric, "Diverged: non-finite training loss (lower the learning rate)");
      }
      adam_step(model, grads, adam, config.learning_rate);
    }
    std::vector<std::size_t> sorted_trn = trn;
    std::sort(sorted_trn.begin(), sorted_trn.end());
    const double tl = mean_loss(model, scaled, sorted_trn);
    if (!std::isfinite(tl)) {
      throw Error(ErrorKind::kNumeric, "Diverged: non-finite training loss (lower the learning rate)");
    }
    result.train_loss.push_back(tl);
    double score = tl;
    if (!val.empty()) {
      score = mean_loss(model, scaled, val);
      result.val_loss.push_back(score);
    }
    if (score < best_score) {
      best_score = score;
      best_train = tl;
      best = model;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      ++epoch;
      break;
    }
  }

  TrainMeta meta;
  meta.seed = config.seed;
  meta.epochs = epoch;
  meta.learning_rate = config.learning_rate;
  meta.batch = config.batch;
  meta.val_frac = config.val_frac;
  meta.final_loss = best_train;
  model = std::move(best);
  model.train_meta = meta;
  return result;
}

std::vector<double> reconstruction_errors(const AeModel& m, std::span<const double> raw) {
  const std::vector<double> scaled = scale(m.scaler, raw);
  const std::size_t w = m.input_width();
  std::vector<double> out(scaled.size() / w);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto x = std::span<const double>(scaled).subspan(i * w, w);
    out[i] = mse(x, forward(m, x).output);
  }
  return out;
}

std::vector<double> latent(const AeModel& m, std::span<const double> raw) {
  const std::vector<double> scaled = scale(m.scaler, raw);
  const std::size_t w = m.input_width();
  std::vector<double> out;
  out.reserve(scaled.size() / w * m.latent_width());
  for (std::size_t i = 0; i < scaled.size() / w; ++i) {
    const auto fw = forward(m, std::span<const double>(scaled).subspan(i * w, w));
    out.insert(out.end(), fw.latent.begin(), fw.latent.end());
  }
  return out;
}

}  // namespace goosead
