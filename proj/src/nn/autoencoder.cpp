#include "fedledger/nn/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedledger/errors.hpp"
#include "fedledger/rng.hpp"

namespace fedledger::nn {

void ArchitectureSpec::validate() const {
  if (input_dim == 0) throw ConfigError("architecture: input_dim must be positive");
  if (encoder_widths.size() < 2) throw ConfigError("architecture: encoder needs at least two widths");
  if (decoder_widths.size() != encoder_widths.size())
    throw ConfigError("architecture: decoder depth differs from encoder depth");
  for (std::size_t i = 0; i < encoder_widths.size(); ++i) {
    if (encoder_widths[i] == 0 || decoder_widths[i] == 0)
      throw ConfigError("architecture: zero layer width");
    if (decoder_widths[i] != encoder_widths[encoder_widths.size() - 1 - i])
      throw ConfigError("architecture: decoder is not the mirror of the encoder");
  }
  if (encoder_widths.front() != input_dim)
    throw ConfigError("architecture: first encoder width must equal input_dim");
  if (!(leaky_slope >= 0.0)) throw ConfigError("architecture: leaky slope must be non-negative");
}

std::size_t ArchitectureSpec::layer_count() const {
  return (encoder_widths.size() - 1) + (decoder_widths.size() - 1);
}

std::vector<LayerShape> ArchitectureSpec::layer_shapes() const {
  std::vector<LayerShape> shapes;
  auto add = [&](const std::vector<std::size_t>& widths) {
    for (std::size_t i = 0; i + 1 < widths.size(); ++i)
      shapes.push_back({static_cast<std::uint32_t>(widths[i + 1]), static_cast<std::uint32_t>(widths[i])});
  };
  add(encoder_widths);
  add(decoder_widths);
  return shapes;
}

bool ArchitectureSpec::uses_tanh(std::size_t layer) const {
  const std::size_t encoder_layers = encoder_widths.size() - 1;
  return layer + 1 == encoder_layers || layer + 1 == layer_count();
}

ArchitectureSpec ArchitectureSpec::symmetric(std::size_t input_dim, std::vector<std::size_t> hidden,
                                             double leaky_slope) {
  ArchitectureSpec spec;
  spec.input_dim = input_dim;
  spec.leaky_slope = leaky_slope;
  spec.encoder_widths.push_back(input_dim);
  spec.encoder_widths.insert(spec.encoder_widths.end(), hidden.begin(), hidden.end());
  spec.decoder_widths.assign(spec.encoder_widths.rbegin(), spec.encoder_widths.rend());
  return spec;
}

ArchitectureSpec ArchitectureSpec::shallow(std::size_t input_dim) {
  return symmetric(input_dim, {128, 64, 32, 16, 8, 4, 2});
}

ArchitectureSpec ArchitectureSpec::deep(std::size_t input_dim) {
  return symmetric(input_dim, {2048, 1024, 512, 256, 128, 64, 32, 16, 8, 4, 2});
}

ParamVector init_model(const ArchitectureSpec& spec, std::uint64_t seed) {
  spec.validate();
  ParamVector params(spec.layer_shapes(), 0.0);
  Rng rng(derive_seed(seed, "init_model"));
  for (std::size_t l = 0; l < params.shapes.size(); ++l) {
    const auto& s = params.shapes[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(s.rows + s.cols));
    for (double& w : params.weights(l)) w = uniform(rng, -limit, limit);
  }
  return params;
}

namespace {

void check_compatible(const ParamVector& params, const ArchitectureSpec& spec, const Matrix& batch) {
  if (batch.cols != spec.input_dim)
    throw ShapeError("batch width " + std::to_string(batch.cols) + " != input_dim " +
                     std::to_string(spec.input_dim));
  if (params.shapes != spec.layer_shapes()) throw ShapeError("parameters do not match architecture");
}

// z = x W^T + b
void dense(const Matrix& x, std::span<const double> w, std::span<const double> b, const LayerShape& s,
           Matrix& z) {
  z = Matrix(x.rows, s.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double* xi = x.data.data() + i * x.cols;
    double* zi = z.data.data() + i * z.cols;
    for (std::size_t o = 0; o < s.rows; ++o) {
      const double* wo = w.data() + o * s.cols;
      double acc = 0.0;
      for (std::size_t k = 0; k < s.cols; ++k) acc += xi[k] * wo[k];
      zi[o] = acc + b[o];
    }
  }
}

void activate(const Matrix& z, bool tanh_layer, double slope, Matrix& a) {
  a = z;
  if (tanh_layer) {
    for (double& v : a.data) v = std::tanh(v);
  } else {
    for (double& v : a.data) v = v > 0.0 ? v : slope * v;
  }
}

}  // namespace

ForwardCache forward_cached(const ParamVector& params, const ArchitectureSpec& spec,
                            const Matrix& batch) {
  check_compatible(params, spec, batch);
  ForwardCache cache;
  const std::size_t n_layers = params.shapes.size();
  cache.activations.reserve(n_layers + 1);
  cache.preactivations.reserve(n_layers);
  cache.activations.push_back(batch);
  for (std::size_t l = 0; l < n_layers; ++l) {
    Matrix z, a;
    dense(cache.activations.back(), params.weights(l), params.bias(l), params.shapes[l], z);
    activate(z, spec.uses_tanh(l), spec.leaky_slope, a);
    cache.preactivations.push_back(std::move(z));
    cache.activations.push_back(std::move(a));
  }
  return cache;
}

Matrix forward(const ParamVector& params, const ArchitectureSpec& spec, const Matrix& batch) {
  check_compatible(params, spec, batch);
  Matrix x = batch;
  for (std::size_t l = 0; l < params.shapes.size(); ++l) {
    Matrix z, a;
    dense(x, params.weights(l), params.bias(l), params.shapes[l], z);
    activate(z, spec.uses_tanh(l), spec.leaky_slope, a);
    x = std::move(a);
  }
  return x;
}

ParamVector backprop(const ParamVector& params, const ArchitectureSpec& spec,
                     const ForwardCache& cache, const Matrix& d_output) {
  ParamVector grad = params.zeros_like();
  Matrix delta = d_output;  // d loss / d activation of the current layer
  for (std::size_t l = params.shapes.size(); l-- > 0;) {
    const auto& s = params.shapes[l];
    const Matrix& z = cache.preactivations[l];
    const Matrix& a = cache.activations[l + 1];
    const Matrix& x = cache.activations[l];
    if (spec.uses_tanh(l)) {
      for (std::size_t i = 0; i < delta.data.size(); ++i) delta.data[i] *= 1.0 - a.data[i] * a.data[i];
    } else {
      for (std::size_t i = 0; i < delta.data.size(); ++i)
        if (!(z.data[i] > 0.0)) delta.data[i] *= spec.leaky_slope;
    }
    auto gw = grad.weights(l);
    auto gb = grad.bias(l);
    for (std::size_t i = 0; i < delta.rows; ++i) {
      const double* di = delta.data.data() + i * delta.cols;
      const double* xi = x.data.data() + i * x.cols;
      for (std::size_t o = 0; o < s.rows; ++o) {
        const double d = di[o];
        gb[o] += d;
        if (d == 0.0) continue;
        double* gwo = gw.data() + o * s.cols;
        for (std::size_t k = 0; k < s.cols; ++k) gwo[k] += d * xi[k];
      }
    }
    if (l == 0) break;
    Matrix prev(delta.rows, s.cols);
    const auto w = params.weights(l);
    for (std::size_t i = 0; i < delta.rows; ++i) {
      const double* di = delta.data.data() + i * delta.cols;
      double* pi = prev.data.data() + i * prev.cols;
      for (std::size_t o = 0; o < s.rows; ++o) {
        const double d = di[o];
        if (d == 0.0) continue;
        const double* wo = w.data() + o * s.cols;
        for (std::size_t k = 0; k < s.cols; ++k) pi[k] += d * wo[k];
      }
    }
    delta = std::move(prev);
  }
  return grad;
}

GradientResult backward(const ParamVector& params, const ArchitectureSpec& spec, const Matrix& batch,
                        const SegmentLayout& layout, double theta_mix) {
  if (batch.rows == 0) throw ShapeError("backward: empty batch");
  ForwardCache cache = forward_cached(params, spec, batch);
  const Matrix& out = cache.output();
  Matrix d_out(out.rows, out.cols);
  LossBreakdown mean{0.0, 0.0, 0.0, theta_mix};
  const double inv_n = 1.0 / static_cast<double>(batch.rows);
  for (std::size_t i = 0; i < batch.rows; ++i) {
    auto row_grad = d_out.row(i);
    const LossBreakdown lb = reconstruction_loss(layout, batch.row(i), out.row(i), theta_mix, row_grad);
    for (double& g : row_grad) g *= inv_n;
    mean.bce_part += lb.bce_part;
    mean.mse_part += lb.mse_part;
  }
  mean.bce_part *= inv_n;
  mean.mse_part *= inv_n;
  mean.total = theta_mix * mean.bce_part + (1.0 - theta_mix) * mean.mse_part;
  return {backprop(params, spec, cache, d_out), mean};
}

std::vector<LossBreakdown> row_losses(const ParamVector& params, const ArchitectureSpec& spec,
                                      const Matrix& batch, const SegmentLayout& layout,
                                      double theta_mix) {
  const Matrix out = forward(params, spec, batch);
  std::vector<LossBreakdown> losses;
  losses.reserve(batch.rows);
  for (std::size_t i = 0; i < batch.rows; ++i)
    losses.push_back(reconstruction_loss(layout, batch.row(i), out.row(i), theta_mix));
  return losses;
}

}  // namespace fedledger::nn
