#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gridrl/rng.hpp"

// Small feed-forward network (input -> hidden -> hidden -> output, tanh
// hidden units, linear output) with hand-derived backpropagation. The sizes
// involved (10 -> 64 -> 64 -> 1) do not justify an external autodiff or
// linear algebra dependency.

namespace gridrl {

class Mlp {
public:
  Mlp() = default;
  Mlp(std::size_t in, std::size_t hidden, std::size_t out)
      : in_(in), hidden_(hidden), out_(out),
        w1_(hidden * in, 0.0), b1_(hidden, 0.0),
        w2_(hidden * hidden, 0.0), b2_(hidden, 0.0),
        w3_(out * hidden, 0.0), b3_(out, 0.0) {}

  std::size_t input_dim() const { return in_; }
  std::size_t hidden_dim() const { return hidden_; }
  std::size_t output_dim() const { return out_; }

  // Xavier-uniform hidden layers; the output layer is scaled down (standard
  // for policy/value heads so the initial policy is near-uniform).
  void init(Rng& rng, double output_scale = 1.0) {
    auto fill = [&](std::vector<double>& w, std::size_t fan_in, std::size_t fan_out, double gain) {
      const double s = gain * std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      for (double& v : w) v = rng.uniform(-s, s);
    };
    fill(w1_, in_, hidden_, 1.0);
    fill(w2_, hidden_, hidden_, 1.0);
    fill(w3_, hidden_, out_, output_scale);
    for (double& v : b1_) v = 0.0;
    for (double& v : b2_) v = 0.0;
    for (double& v : b3_) v = 0.0;
  }

  struct Cache {
    std::vector<double> x, h1, h2, y;
  };

  void forward(const std::vector<double>& x, Cache& c) const {
    if (x.size() != in_) throw std::invalid_argument("mlp: input dimension mismatch");
    for (double v : x)
      if (!std::isfinite(v)) throw std::invalid_argument("mlp: non-finite input");
    c.x = x;
    c.h1.assign(hidden_, 0.0);
    for (std::size_t j = 0; j < hidden_; ++j) {
      double z = b1_[j];
      const double* row = &w1_[j * in_];
      for (std::size_t k = 0; k < in_; ++k) z += row[k] * x[k];
      c.h1[j] = std::tanh(z);
    }
    c.h2.assign(hidden_, 0.0);
    for (std::size_t j = 0; j < hidden_; ++j) {
      double z = b2_[j];
      const double* row = &w2_[j * hidden_];
      for (std::size_t k = 0; k < hidden_; ++k) z += row[k] * c.h1[k];
      c.h2[j] = std::tanh(z);
    }
    c.y.assign(out_, 0.0);
    for (std::size_t j = 0; j < out_; ++j) {
      double z = b3_[j];
      const double* row = &w3_[j * hidden_];
      for (std::size_t k = 0; k < hidden_; ++k) z += row[k] * c.h2[k];
      c.y[j] = z;
    }
  }

  std::vector<double> forward(const std::vector<double>& x) const {
    Cache c;
    forward(x, c);
    return c.y;
  }

  // Accumulates d(loss)/d(params) into `grad` (same shape as *this) given
  // d(loss)/d(output) for the cached forward pass.
  void backward(const Cache& c, const std::vector<double>& dy, Mlp& grad) const {
    std::vector<double> dh2(hidden_, 0.0);
    for (std::size_t j = 0; j < out_; ++j) {
      const double g = dy[j];
      grad.b3_[j] += g;
      double* grow = &grad.w3_[j * hidden_];
      const double* row = &w3_[j * hidden_];
      for (std::size_t k = 0; k < hidden_; ++k) {
        grow[k] += g * c.h2[k];
        dh2[k] += g * row[k];
      }
    }
    std::vector<double> dh1(hidden_, 0.0);
    for (std::size_t j = 0; j < hidden_; ++j) {
      const double g = dh2[j] * (1.0 - c.h2[j] * c.h2[j]);
      grad.b2_[j] += g;
      double* grow = &grad.w2_[j * hidden_];
      const double* row = &w2_[j * hidden_];
      for (std::size_t k = 0; k < hidden_; ++k) {
        grow[k] += g * c.h1[k];
        dh1[k] += g * row[k];
      }
    }
    for (std::size_t j = 0; j < hidden_; ++j) {
      const double g = dh1[j] * (1.0 - c.h1[j] * c.h1[j]);
      grad.b1_[j] += g;
      double* grow = &grad.w1_[j * in_];
      for (std::size_t k = 0; k < in_; ++k) grow[k] += g * c.x[k];
    }
  }

  Mlp zeros_like() const { return Mlp(in_, hidden_, out_); }

  // Flat parameter view, fixed order; shared by the optimizer, the
  // checkpoint writer and the finite-difference tests.
  template <typename F>
  void for_each_param(F&& f) {
    for (double& v : w1_) f(v);
    for (double& v : b1_) f(v);
    for (double& v : w2_) f(v);
    for (double& v : b2_) f(v);
    for (double& v : w3_) f(v);
    for (double& v : b3_) f(v);
  }

  template <typename F>
  void for_each_param(F&& f) const {
    for (double v : w1_) f(v);
    for (double v : b1_) f(v);
    for (double v : w2_) f(v);
    for (double v : b2_) f(v);
    for (double v : w3_) f(v);
    for (double v : b3_) f(v);
  }

  std::size_t n_params() const {
    return w1_.size() + b1_.size() + w2_.size() + b2_.size() + w3_.size() + b3_.size();
  }

private:
  std::size_t in_ = 0, hidden_ = 0, out_ = 0;
  std::vector<double> w1_, b1_, w2_, b2_, w3_, b3_;
};

// Adam with bias correction over a flat parameter vector.
class Adam {
public:
  Adam() = default;
  Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    if (params.size() != m_.size() || grad.size() != m_.size())
      throw std::invalid_argument("adam: size mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t k = 0; k < params.size(); ++k) {
      m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grad[k];
      v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * grad[k] * grad[k];
      params[k] -= lr_ * (m_[k] / bc1) / (std::sqrt(v_[k] / bc2) + eps_);
    }
  }

private:
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::vector<double> m_, v_;
  long t_ = 0;
};

}  // namespace gridrl
