#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gridrl {

// Per-dimension running mean/variance (Welford). Used to normalize raw
// physical-unit observations before they reach the networks.
class RunningNormalizer {
public:
  explicit RunningNormalizer(std::size_t dim = 0) : mean_(dim, 0.0), m2_(dim, 0.0) {}

  std::size_t dim() const { return mean_.size(); }
  double count() const { return count_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& m2() const { return m2_; }

  void update(const std::vector<double>& x) {
    if (x.size() != mean_.size()) throw std::invalid_argument("normalizer: dimension mismatch");
    count_ += 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double delta = x[k] - mean_[k];
      mean_[k] += delta / count_;
      m2_[k] += delta * (x[k] - mean_[k]);
    }
  }

  double variance(std::size_t k) const { return count_ > 0.0 ? m2_[k] / count_ : 1.0; }

  std::vector<double> normalize(const std::vector<double>& x, double clip = 10.0) const {
    if (x.size() != mean_.size()) throw std::invalid_argument("normalizer: dimension mismatch");
    std::vector<double> out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double sd = std::sqrt(variance(k) + 1e-8);
      out[k] = std::clamp((x[k] - mean_[k]) / sd, -clip, clip);
    }
    return out;
  }

  // Checkpoint restore.
  void restore(double count, std::vector<double> mean, std::vector<double> m2) {
    if (mean.size() != m2.size()) throw std::invalid_argument("normalizer: restore size mismatch");
    count_ = count;
    mean_ = std::move(mean);
    m2_ = std::move(m2);
  }

private:
  double count_ = 0.0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

}  // namespace gridrl
