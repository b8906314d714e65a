#include "sdpcd/spin_config.hpp"

#include <algorithm>
#include <cmath>

#include "sdpcd/errors.hpp"

namespace sdpcd {

SpinConfig::SpinConfig(std::size_t n, std::size_t m, std::vector<double> values)
    : n_(n), m_(m), values_(std::move(values)), magnetization_(m, 0.0) {
  if (m == 0) throw InvalidParameter("spin rank m must be >= 1");
  if (values_.size() != n * m) throw InvalidParameter("spin value count != n*m");
  refresh_magnetization();
}

void SpinConfig::refresh_magnetization() {
  std::fill(magnetization_.begin(), magnetization_.end(), 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* x = values_.data() + i * m_;
    for (std::size_t k = 0; k < m_; ++k) magnetization_[k] += x[k];
  }
}

double SpinConfig::magnetization_norm() const noexcept {
  if (n_ == 0) return 0.0;
  double s = 0.0;
  for (double v : magnetization_) s += v * v;
  return std::sqrt(s) / static_cast<double>(n_);
}

double SpinConfig::max_norm_error() const noexcept {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (double v : spin(i)) s += v * v;
    worst = std::max(worst, std::abs(std::sqrt(s) - 1.0));
  }
  return worst;
}

SpinConfig init_config(std::size_t n, std::size_t m, Seed seed) {
  if (n == 0) throw InvalidParameter("spin count n must be >= 1");
  if (m == 0) throw InvalidParameter("spin rank m must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> values(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    double* x = values.data() + i * m;
    double s = 0.0;
    do {
      s = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        x[k] = gauss(rng);
        s += x[k] * x[k];
      }
    } while (s < 1e-300);
    const double inv = 1.0 / std::sqrt(s);
    for (std::size_t k = 0; k < m; ++k) x[k] *= inv;
  }
  return SpinConfig(n, m, std::move(values));
}

}  // namespace sdpcd
