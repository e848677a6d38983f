#include "pulsegrid/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace pulsegrid {

Adam::Adam(std::vector<NamedGrad> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const NamedGrad& p : params_) {
    m_.push_back(Tensor::zeros(p.value->shape()));
    v_.push_back(Tensor::zeros(p.value->shape()));
  }
}

void Adam::step(real lr) {
  ++t_;
  const real bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<real>(t_));
  const real bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<real>(t_));
  for (size_t k = 0; k < params_.size(); ++k) {
    const NamedGrad& p = params_[k];
    if (!p.grad->all_finite())
      throw std::runtime_error("non-finite gradient in " + p.name + " at optimizer step " +
                               std::to_string(t_));
    Tensor& m = m_[k];
    Tensor& v = v_[k];
    const int64_t n = p.value->numel();
    for (int64_t i = 0; i < n; ++i) {
      const real g = (*p.grad)[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      const real mhat = m[i] / bc1;
      const real vhat = v[i] / bc2;
      (*p.value)[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace pulsegrid
