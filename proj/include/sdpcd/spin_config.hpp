#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sdpcd/rng.hpp"

namespace sdpcd {

/// n unit vectors in R^m stored row-major, plus the running magnetization
/// M = sum_i x_i. Writers that bypass the solver must call
/// refresh_magnetization() afterwards.
class SpinConfig {
 public:
  SpinConfig() = default;

  /// Takes ownership of n*m row-major values. Rows are not renormalized.
  SpinConfig(std::size_t n, std::size_t m, std::vector<double> values);

  std::size_t num_spins() const noexcept { return n_; }
  std::size_t rank() const noexcept { return m_; }

  std::span<const double> spin(std::size_t i) const noexcept {
    return {values_.data() + i * m_, m_};
  }
  std::span<double> spin(std::size_t i) noexcept { return {values_.data() + i * m_, m_}; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  std::span<const double> magnetization() const noexcept { return magnetization_; }
  std::span<double> magnetization() noexcept { return magnetization_; }

  void refresh_magnetization();

  /// ||M|| / n
  double magnetization_norm() const noexcept;

  /// max_i | ||x_i|| - 1 |
  double max_norm_error() const noexcept;

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<double> values_;
  std::vector<double> magnetization_;
};

/// Independent uniform draws on the unit sphere S^{m-1}.
SpinConfig init_config(std::size_t n, std::size_t m, Seed seed);

}  // namespace sdpcd
