#include "glyphocr/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glyphocr/errors.hpp"

namespace glyphocr::layers {

namespace {

struct ConvDims {
  std::size_t in_c, in_h, in_w, out_c, out_h, out_w, k;
};

ConvDims conv_dims(const Tensor& input, std::size_t weight_count, std::size_t bias_count, int kernel) {
  if (input.rank() != 3) fail(ErrorCode::ShapeMismatch, "conv2d expects (C,H,W), got " + input.shape_string());
  if (kernel < 1) fail(ErrorCode::ShapeMismatch, "conv2d kernel must be >= 1");
  const auto k = static_cast<std::size_t>(kernel);
  ConvDims d{input.dim(0), input.dim(1), input.dim(2), bias_count, 0, 0, k};
  if (d.in_h < k || d.in_w < k) fail(ErrorCode::ShapeMismatch, "conv2d kernel larger than input " + input.shape_string());
  if (d.out_c == 0 || weight_count != d.out_c * d.in_c * k * k) {
    fail(ErrorCode::ShapeMismatch, "conv2d weights do not match input channels " + input.shape_string());
  }
  d.out_h = d.in_h - k + 1;
  d.out_w = d.in_w - k + 1;
  return d;
}

}  // namespace

Tensor conv2d(const Tensor& input, std::span<const double> weights, std::span<const double> bias, int kernel) {
  const ConvDims d = conv_dims(input, weights.size(), bias.size(), kernel);
  Tensor out({d.out_c, d.out_h, d.out_w});
  const auto in = input.data();
  auto o_data = out.data();
  for (std::size_t o = 0; o < d.out_c; ++o) {
    double* plane = o_data.data() + o * d.out_h * d.out_w;
    std::fill(plane, plane + d.out_h * d.out_w, bias[o]);
    for (std::size_t c = 0; c < d.in_c; ++c) {
      const double* src = in.data() + c * d.in_h * d.in_w;
      const double* w = weights.data() + (o * d.in_c + c) * d.k * d.k;
      for (std::size_t ky = 0; ky < d.k; ++ky) {
        for (std::size_t kx = 0; kx < d.k; ++kx) {
          const double wv = w[ky * d.k + kx];
          for (std::size_t y = 0; y < d.out_h; ++y) {
            const double* row = src + (y + ky) * d.in_w + kx;
            double* dst = plane + y * d.out_w;
            for (std::size_t x = 0; x < d.out_w; ++x) dst[x] += wv * row[x];
          }
        }
      }
    }
  }
  return out;
}

Tensor conv2d_backward(const Tensor& input, std::span<const double> weights, int kernel, const Tensor& grad_output,
                       std::span<double> grad_weights, std::span<double> grad_bias, bool need_input_grad) {
  const ConvDims d = conv_dims(input, weights.size(), grad_bias.size(), kernel);
  if (grad_output.shape() != std::vector<std::size_t>{d.out_c, d.out_h, d.out_w} || grad_weights.size() != weights.size()) {
    fail(ErrorCode::ShapeMismatch, "conv2d backward: gradient shape " + grad_output.shape_string());
  }
  Tensor grad_input = need_input_grad ? Tensor(input.shape()) : Tensor();
  const auto in = input.data();
  const auto g = grad_output.data();
  for (std::size_t o = 0; o < d.out_c; ++o) {
    const double* gplane = g.data() + o * d.out_h * d.out_w;
    double bsum = 0.0;
    for (std::size_t i = 0; i < d.out_h * d.out_w; ++i) bsum += gplane[i];
    grad_bias[o] += bsum;
    for (std::size_t c = 0; c < d.in_c; ++c) {
      const double* src = in.data() + c * d.in_h * d.in_w;
      double* gin = need_input_grad ? grad_input.data().data() + c * d.in_h * d.in_w : nullptr;
      const std::size_t wbase = (o * d.in_c + c) * d.k * d.k;
      for (std::size_t ky = 0; ky < d.k; ++ky) {
        for (std::size_t kx = 0; kx < d.k; ++kx) {
          const double wv = weights[wbase + ky * d.k + kx];
          double acc = 0.0;
          for (std::size_t y = 0; y < d.out_h; ++y) {
            const double* row = src + (y + ky) * d.in_w + kx;
            const double* grow = gplane + y * d.out_w;
            for (std::size_t x = 0; x < d.out_w; ++x) acc += grow[x] * row[x];
            if (gin != nullptr) {
              double* dst = gin + (y + ky) * d.in_w + kx;
              for (std::size_t x = 0; x < d.out_w; ++x) dst[x] += wv * grow[x];
            }
          }
          grad_weights[wbase + ky * d.k + kx] += acc;
        }
      }
    }
  }
  return grad_input;
}

Tensor relu(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_output) {
  if (input.shape() != grad_output.shape()) fail(ErrorCode::ShapeMismatch, "relu backward shape mismatch");
  Tensor grad = grad_output;
  const auto in = input.data();
  auto g = grad.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(in[i] > 0.0)) g[i] = 0.0;
  }
  return grad;
}

PoolResult maxpool2x2(const Tensor& input) {
  if (input.rank() != 3) fail(ErrorCode::ShapeMismatch, "maxpool expects (C,H,W), got " + input.shape_string());
  const std::size_t c = input.dim(0), h = input.dim(1), w = input.dim(2);
  if (h % 2 != 0 || w % 2 != 0) fail(ErrorCode::OddDimension, "maxpool2x2 on " + input.shape_string());
  PoolResult r{Tensor({c, h / 2, w / 2}), {}};
  r.argmax.resize(r.output.size());
  const auto in = input.data();
  std::size_t out_i = 0;
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < h; y += 2) {
      for (std::size_t x = 0; x < w; x += 2, ++out_i) {
        const std::size_t base = (ch * h + y) * w + x;
        const std::size_t cells[4] = {base, base + 1, base + w, base + w + 1};
        std::size_t best = cells[0];
        for (std::size_t k = 1; k < 4; ++k) {
          if (in[cells[k]] > in[best]) best = cells[k];
        }
        r.output[out_i] = in[best];
        r.argmax[out_i] = static_cast<std::uint32_t>(best);
      }
    }
  }
  return r;
}

Tensor maxpool2x2_backward(const std::vector<std::size_t>& input_shape, std::span<const std::uint32_t> argmax,
                           const Tensor& grad_output) {
  if (argmax.size() != grad_output.size()) fail(ErrorCode::ShapeMismatch, "maxpool backward argmax size");
  Tensor grad(input_shape);
  for (std::size_t i = 0; i < argmax.size(); ++i) grad[argmax[i]] += grad_output[i];
  return grad;
}

Tensor dense(std::span<const double> input, std::span<const double> weights, std::span<const double> bias,
             std::size_t outputs) {
  if (bias.size() != outputs || weights.size() != outputs * input.size()) {
    fail(ErrorCode::ShapeMismatch, "dense weights do not match " + std::to_string(input.size()) + " -> " +
                                       std::to_string(outputs));
  }
  Tensor out({outputs});
  for (std::size_t o = 0; o < outputs; ++o) {
    const double* w = weights.data() + o * input.size();
    double acc = bias[o];
    for (std::size_t i = 0; i < input.size(); ++i) acc += w[i] * input[i];
    out[o] = acc;
  }
  return out;
}

Tensor dense_backward(std::span<const double> input, std::span<const double> weights, const Tensor& grad_output,
                      std::span<double> grad_weights, std::span<double> grad_bias) {
  const std::size_t outputs = grad_output.size();
  if (grad_bias.size() != outputs || grad_weights.size() != weights.size() || weights.size() != outputs * input.size()) {
    fail(ErrorCode::ShapeMismatch, "dense backward shape mismatch");
  }
  Tensor grad_input({input.size()});
  for (std::size_t o = 0; o < outputs; ++o) {
    const double g = grad_output[o];
    grad_bias[o] += g;
    const double* w = weights.data() + o * input.size();
    double* gw = grad_weights.data() + o * input.size();
    for (std::size_t i = 0; i < input.size(); ++i) {
      gw[i] += g * input[i];
      grad_input[i] += g * w[i];
    }
  }
  return grad_input;
}

Tensor softmax(const Tensor& logits) {
  Tensor probs = logits;
  auto p = probs.data();
  const double top = *std::max_element(p.begin(), p.end());
  double total = 0.0;
  for (double& v : p) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : p) v /= total;
  return probs;
}

}  // namespace glyphocr::layers
