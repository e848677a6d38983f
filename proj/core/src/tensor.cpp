#include "pulsegrid/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pulsegrid {

namespace {
int64_t checked_numel(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("tensor dimension must be positive, got " + shape_to_string(shape));
    n *= d;
  }
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  v_.assign(static_cast<size_t>(checked_numel(shape_)), 0.0);
}

Tensor::Tensor(std::vector<int> shape, std::vector<real> values)
    : shape_(std::move(shape)), v_(std::move(values)) {
  if (checked_numel(shape_) != static_cast<int64_t>(v_.size())) {
    throw std::invalid_argument("tensor shape " + shape_to_string(shape_) + " does not match " +
                                std::to_string(v_.size()) + " values");
  }
}

Tensor Tensor::full(std::vector<int> shape, real value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

void Tensor::fill(real value) {
  for (auto& x : v_) x = value;
}

Tensor Tensor::reshaped(std::vector<int> shape) const {
  if (checked_numel(shape) != numel()) {
    throw std::invalid_argument("cannot reshape " + shape_to_string(shape_) + " to " +
                                shape_to_string(shape));
  }
  return Tensor(std::move(shape), v_);
}

bool Tensor::all_finite() const {
  for (real x : v_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string Tensor::shape_str() const { return shape_to_string(shape_); }

std::string shape_to_string(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

}  // namespace pulsegrid
