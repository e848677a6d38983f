#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace pulsegrid {

// All numerics run in 64-bit floats: the finite-difference checks need the
// headroom and the kernels are fast enough that a 32-bit build is not worth
// a second code path.
using real = double;

// Dense row-major tensor. Shapes are fixed at construction; reshape only
// rearranges the view of the same contiguous buffer.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, std::vector<real> values);

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<int> shape, real value);
  static Tensor from_values(std::vector<int> shape, std::vector<real> values) {
    return Tensor(std::move(shape), std::move(values));
  }

  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int64_t numel() const { return static_cast<int64_t>(v_.size()); }
  bool empty() const { return v_.empty(); }

  real* data() { return v_.data(); }
  const real* data() const { return v_.data(); }
  std::vector<real>& values() { return v_; }
  const std::vector<real>& values() const { return v_; }

  real& operator[](int64_t i) { return v_[static_cast<size_t>(i)]; }
  real operator[](int64_t i) const { return v_[static_cast<size_t>(i)]; }

  real& at(int i) { return v_[static_cast<size_t>(i)]; }
  real& at(int i, int j) { return v_[static_cast<size_t>(i) * shape_[1] + j]; }
  real& at(int i, int j, int k) {
    return v_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  real& at(int i, int j, int k, int l) {
    return v_[((static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
  }
  real at(int i) const { return v_[static_cast<size_t>(i)]; }
  real at(int i, int j) const { return v_[static_cast<size_t>(i) * shape_[1] + j]; }
  real at(int i, int j, int k) const {
    return v_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  real at(int i, int j, int k, int l) const {
    return v_[((static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
  }

  void fill(real value);
  void zero() { fill(0.0); }

  // Same buffer, new shape; element count must match.
  Tensor reshaped(std::vector<int> shape) const;

  bool all_finite() const;
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  std::string shape_str() const;

 private:
  std::vector<int> shape_;
  std::vector<real> v_;
};

std::string shape_to_string(const std::vector<int>& shape);

}  // namespace pulsegrid
