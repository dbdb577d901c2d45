#include "fedledger/nn/loss.hpp"

#include <algorithm>
#include <cmath>

#include "fedledger/errors.hpp"

namespace fedledger::nn {

LossBreakdown reconstruction_loss(const SegmentLayout& layout, std::span<const double> target,
                                  std::span<const double> output, double theta_mix,
                                  std::span<double> d_output) {
  if (target.size() != layout.width || output.size() != layout.width)
    throw ShapeError("reconstruction_loss: row width does not match layout");
  const bool want_grad = !d_output.empty();
  if (want_grad) {
    if (d_output.size() != layout.width) throw ShapeError("reconstruction_loss: gradient width");
    std::fill(d_output.begin(), d_output.end(), 0.0);
  }
  for (double y : output)
    if (!std::isfinite(y)) throw NumericError("reconstruction_loss: non-finite reconstruction");

  LossBreakdown lb;
  lb.theta_mix = theta_mix;

  const std::size_t n_cat = layout.categorical.size();
  if (n_cat > 0) {
    const double inv_j = 1.0 / static_cast<double>(n_cat);
    double sum = 0.0;
    for (const Segment& seg : layout.categorical) {
      const double inv_u = 1.0 / static_cast<double>(seg.width);
      double seg_sum = 0.0;
      for (std::size_t k = seg.offset; k < seg.offset + seg.width; ++k) {
        const double raw = 0.5 * (output[k] + 1.0);
        const double p = std::clamp(raw, kProbabilityClamp, 1.0 - kProbabilityClamp);
        const double t = target[k];
        seg_sum -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
        if (want_grad && raw == p) {
          const double dl_dp = -t / p + (1.0 - t) / (1.0 - p);
          d_output[k] = theta_mix * inv_j * inv_u * dl_dp * 0.5;
        }
      }
      sum += seg_sum * inv_u;
    }
    lb.bce_part = sum * inv_j;
  }

  const std::size_t n_num = layout.numerical.size();
  if (n_num > 0) {
    const double inv_k = 1.0 / static_cast<double>(n_num);
    double sum = 0.0;
    for (std::size_t k : layout.numerical) {
      const double diff = output[k] - target[k];
      sum += diff * diff;
      if (want_grad) d_output[k] = (1.0 - theta_mix) * inv_k * 2.0 * diff;
    }
    lb.mse_part = sum * inv_k;
  }

  lb.total = theta_mix * lb.bce_part + (1.0 - theta_mix) * lb.mse_part;
  return lb;
}

}  // namespace fedledger::nn
