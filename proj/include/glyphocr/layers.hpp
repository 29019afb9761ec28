#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "glyphocr/tensor.hpp"

// Forward and backward kernels for the four layer types. Backward functions
// *accumulate* into parameter gradient buffers so batches can sum in place.
namespace glyphocr::layers {

/// Valid (no padding), stride-1 convolution. `weights` is laid out
/// [out][in][ky][kx]; `bias` has one entry per output channel.
Tensor conv2d(const Tensor& input, std::span<const double> weights, std::span<const double> bias, int kernel);

/// Returns dL/d(input); skipped (empty tensor) when `need_input_grad` is false.
Tensor conv2d_backward(const Tensor& input, std::span<const double> weights, int kernel, const Tensor& grad_output,
                       std::span<double> grad_weights, std::span<double> grad_bias, bool need_input_grad = true);

Tensor relu(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& grad_output);

struct PoolResult {
  Tensor output;
  std::vector<std::uint32_t> argmax;  // flat input index per output cell
};

/// Disjoint 2x2 windows, stride 2. Ties go to the first cell in row-major
/// order. Throws OddDimension on odd height or width.
PoolResult maxpool2x2(const Tensor& input);
Tensor maxpool2x2_backward(const std::vector<std::size_t>& input_shape, std::span<const std::uint32_t> argmax,
                           const Tensor& grad_output);

/// y = W x + b with W laid out [out][in].
Tensor dense(std::span<const double> input, std::span<const double> weights, std::span<const double> bias,
             std::size_t outputs);
Tensor dense_backward(std::span<const double> input, std::span<const double> weights, const Tensor& grad_output,
                      std::span<double> grad_weights, std::span<double> grad_bias);

/// Max-shifted softmax.
Tensor softmax(const Tensor& logits);

}  // namespace glyphocr::layers
