#include "glyphocr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "glyphocr/errors.hpp"

namespace glyphocr {

namespace {

std::size_t element_count(const std::vector<std::size_t>& shape) {
  if (shape.empty() || shape.size() > 3) fail(ErrorCode::ShapeMismatch, "tensor rank must be 1..3");
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill) : shape_(std::move(shape)) {
  data_.assign(element_count(shape_), fill);
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != element_count(shape_)) {
    fail(ErrorCode::ShapeMismatch, "tensor data length " + std::to_string(data_.size()) + " does not fit " + shape_string());
  }
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string Tensor::shape_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape_[i]);
  }
  return out + ")";
}

}  // namespace glyphocr
