#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fedledger/nn/layout.hpp"
#include "fedledger/nn/loss.hpp"
#include "fedledger/nn/matrix.hpp"
#include "fedledger/nn/param_vector.hpp"

namespace fedledger::nn {

// Symmetric dense autoencoder. Widths include the input layer, so
// encoder {10, 4, 2} with decoder {2, 4, 10} has four dense layers.
struct ArchitectureSpec {
  std::vector<std::size_t> encoder_widths;
  std::vector<std::size_t> decoder_widths;
  double leaky_slope = 0.4;
  std::size_t input_dim = 0;

  // Throws ConfigError unless the decoder mirrors the encoder, the outer
  // widths equal input_dim and all widths are positive.
  void validate() const;

  std::size_t layer_count() const;
  std::vector<LayerShape> layer_shapes() const;
  // Tanh for the bottleneck and the final reconstruction layer, Leaky-ReLU
  // everywhere else.
  bool uses_tanh(std::size_t layer) const;

  // Builds a symmetric spec from input_dim and the hidden widths down to the
  // bottleneck.
  static ArchitectureSpec symmetric(std::size_t input_dim, std::vector<std::size_t> hidden,
                                    double leaky_slope = 0.4);
  // 128-64-32-16-8-4-2 (global anomalies).
  static ArchitectureSpec shallow(std::size_t input_dim);
  // 2048-1024-...-4-2 (local anomalies).
  static ArchitectureSpec deep(std::size_t input_dim);
};

// Weights ~ U(-sqrt(6/(fan_in+fan_out)), +sqrt(...)), biases zero.
ParamVector init_model(const ArchitectureSpec& spec, std::uint64_t seed);

Matrix forward(const ParamVector& params, const ArchitectureSpec& spec, const Matrix& batch);

// Everything produced by one training-mode forward pass, reused by backward.
struct ForwardCache {
  std::vector<Matrix> activations;  // activations[0] = input, back() = output
  std::vector<Matrix> preactivations;
  const Matrix& output() const { return activations.back(); }
};

ForwardCache forward_cached(const ParamVector& params, const ArchitectureSpec& spec,
                            const Matrix& batch);

// Backpropagates d_output (n x input_dim) through the cached pass. The
// result is the gradient of sum_i <d_output_i, output_i> with respect to the
// parameters; callers fold any 1/n into d_output.
ParamVector backprop(const ParamVector& params, const ArchitectureSpec& spec,
                     const ForwardCache& cache, const Matrix& d_output);

struct GradientResult {
  ParamVector gradient;
  LossBreakdown mean_loss;
};

// Gradient of the mean per-row reconstruction loss over the batch, where the
// batch itself is the reconstruction target.
GradientResult backward(const ParamVector& params, const ArchitectureSpec& spec,
                        const Matrix& batch, const SegmentLayout& layout, double theta_mix);

// Per-row reconstruction losses (the anomaly scores).
std::vector<LossBreakdown> row_losses(const ParamVector& params, const ArchitectureSpec& spec,
                                      const Matrix& batch, const SegmentLayout& layout,
                                      double theta_mix);

}  // namespace fedledger::nn
