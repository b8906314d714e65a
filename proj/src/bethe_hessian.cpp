#include "sdpcd/bethe_hessian.hpp"

#include <algorithm>
#include <cmath>

#include "sdpcd/dense_eigen.hpp"
#include "sdpcd/errors.hpp"

namespace sdpcd {

void BetheHessianOperator::apply(std::span<const double> v, std::span<double> out) const {
  const Graph& g = *graph_;
  const std::size_t n = g.num_vertices();
  if (v.size() != n || out.size() != n) throw InvalidParameter("matvec dimension mismatch");
  const double shift = r_ * r_ - 1.0;
  for (VertexId i = 0; i < n; ++i) {
    double adj = 0.0;
    for (VertexId j : g.neighbors(i)) adj += v[j];
    out[i] = (shift + static_cast<double>(g.degree(i))) * v[i] - r_ * adj;
  }
}

std::vector<double> bh_matvec(const BetheHessianOperator& op, std::span<const double> v) {
  std::vector<double> out(op.dim());
  op.apply(v, out);
  return out;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

class KrylovBasis {
 public:
  KrylovBasis(std::size_t dim, std::size_t capacity) : dim_(dim) {
    data_.reserve(dim * capacity);
  }

  std::size_t size() const noexcept { return data_.size() / dim_; }
  std::span<const double> operator[](std::size_t j) const { return {data_.data() + j * dim_, dim_}; }
  void clear() { data_.clear(); }
  void push(std::span<const double> v) { data_.insert(data_.end(), v.begin(), v.end()); }

  // Two passes of classical Gram-Schmidt against every stored vector.
  void orthogonalize(std::span<double> w) const {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < size(); ++j) {
        auto q = (*this)[j];
        const double c = dot(q, w);
        for (std::size_t i = 0; i < dim_; ++i) w[i] -= c * q[i];
      }
    }
  }

  // out = sum_j coeffs[j] q_j
  void combine(std::span<const double> coeffs, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      auto q = (*this)[j];
      const double c = coeffs[j];
      for (std::size_t i = 0; i < dim_; ++i) out[i] += c * q[i];
    }
  }

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

void random_unit(std::span<double> v, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& x : v) x = gauss(rng);
  const double nv = norm(v);
  for (double& x : v) x /= nv;
}

// Draws a random unit vector orthogonal to the basis. False if the basis
// already spans the space.
bool fresh_direction(const KrylovBasis& basis, std::span<double> v, Rng& rng) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    random_unit(v, rng);
    basis.orthogonalize(v);
    const double nv = norm(v);
    if (nv > 1e-6) {
      for (double& x : v) x /= nv;
      return true;
    }
  }
  return false;
}

}  // namespace

EigenPairs smallest_eigenpairs(const LinearOperator& apply, std::size_t dim,
                               const LanczosOptions& options) {
  if (options.count == 0) throw InvalidParameter("eigenpair count must be >= 1");
  if (options.count > dim) throw InvalidParameter("eigenpair count exceeds dimension");
  if (options.max_iterations < options.count) {
    throw InvalidParameter("max_iterations must be at least the eigenpair count");
  }
  const std::size_t k = options.count;
  const std::size_t capacity = std::min(dim, std::max(options.max_basis, 2 * k + 8));

  Rng rng(options.seed);
  KrylovBasis basis(dim, capacity);
  std::vector<double> alpha, beta;  // beta[j] couples q_j and q_{j+1}
  std::vector<double> q(dim), w(dim), restart(dim);
  random_unit(q, rng);

  EigenPairs out;
  // Normalized Ritz vector idx of the current basis.
  auto ritz = [&](const SymmetricEigen& eig, std::size_t idx, std::span<double> v) {
    std::vector<double> coeffs(basis.size());
    for (std::size_t j = 0; j < coeffs.size(); ++j) coeffs[j] = eig.vectors(j, idx);
    basis.combine(coeffs, v);
    const double nv = norm(v);
    for (double& x : v) x /= nv;
  };

  while (true) {
    // Grow the basis from q.
    basis.push(q);
    bool full_space = false;
    while (true) {
      const std::size_t j = basis.size() - 1;
      apply(basis[j], w);
      ++out.iterations;
      const double a = dot(basis[j], w);
      alpha.push_back(a);
      basis.orthogonalize(w);
      double b = norm(w);

      const bool at_capacity = basis.size() >= capacity;
      const bool budget_spent = out.iterations >= options.max_iterations;
      if (b <= 1e-10 * std::max(1.0, std::abs(a))) {
        // Invariant subspace: continue with an orthogonal fresh direction.
        b = 0.0;
        if (basis.size() == dim || !fresh_direction(basis, w, rng)) {
          full_space = true;
          break;
        }
      } else {
        for (double& x : w) x /= b;
      }
      if (at_capacity || budget_spent) break;
      // Check Ritz residual estimates every few steps once the basis can
      // hold k vectors.
      if (basis.size() >= k && basis.size() % 8 == 0 && b != 0.0 && dim > capacity) {
        const SymmetricEigen t = tridiagonal_eigen(alpha, beta);
        const std::size_t last = basis.size() - 1;
        bool ok = true;
        for (std::size_t idx = 0; idx < k && ok; ++idx) {
          ok = std::abs(b * t.vectors(last, idx)) <= 0.1 * options.tolerance;
        }
        if (ok) break;
      }
      beta.push_back(b);
      basis.push(w);
    }

    // Ritz pairs from the current basis.
    const SymmetricEigen t = tridiagonal_eigen(alpha, beta);
    out.values.assign(k, 0.0);
    out.vectors.assign(k, std::vector<double>(dim));
    out.residuals.assign(k, 0.0);
    bool all_ok = true;
    for (std::size_t idx = 0; idx < k; ++idx) {
      out.values[idx] = t.values[idx];
      ritz(t, idx, out.vectors[idx]);
      apply(out.vectors[idx], w);
      for (std::size_t i = 0; i < dim; ++i) w[i] -= t.values[idx] * out.vectors[idx][i];
      out.residuals[idx] = norm(w);
      all_ok = all_ok && out.residuals[idx] <= options.tolerance;
    }
    out.converged = all_ok;
    if (all_ok || full_space || out.iterations >= options.max_iterations) break;

    // Explicit restart from the sum of the wanted Ritz vectors.
    std::fill(restart.begin(), restart.end(), 0.0);
    for (const auto& v : out.vectors) {
      for (std::size_t i = 0; i < dim; ++i) restart[i] += v[i];
    }
    const double nr = norm(restart);
    for (std::size_t i = 0; i < dim; ++i) q[i] = restart[i] / nr;
    basis.clear();
    alpha.clear();
    beta.clear();
  }

  // Re-orthonormalize the returned vectors; matters only for clustered Ritz
  // values.
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      const double c = dot(out.vectors[b], out.vectors[a]);
      for (std::size_t i = 0; i < dim; ++i) out.vectors[a][i] -= c * out.vectors[b][i];
    }
    const double nv = norm(out.vectors[a]);
    for (double& x : out.vectors[a]) x /= nv;
  }
  return out;
}

EigenPairs smallest_eigenpairs(const BetheHessianOperator& op, const LanczosOptions& options) {
  return smallest_eigenpairs(
      [&op](std::span<const double> v, std::span<double> out) { op.apply(v, out); }, op.dim(),
      options);
}

double inverse_participation_ratio(std::span<const double> v) {
  double s2 = 0.0, s4 = 0.0;
  for (double x : v) {
    const double x2 = x * x;
    s2 += x2;
    s4 += x2 * x2;
  }
  return s2 > 0.0 ? s4 / (s2 * s2) : 0.0;
}

SpectralEstimate bethe_hessian_estimate(const Graph& g, const LanczosOptions& options) {
  const std::size_t n = g.num_vertices();
  if (n < 2) throw InvalidParameter("spectral estimate needs at least two vertices");
  if (g.num_edges() == 0) throw InvalidParameter("spectral estimate needs a non-empty edge set");

  SpectralEstimate est;
  est.r = std::sqrt(g.mean_degree());
  BetheHessianOperator op(g, est.r);
  LanczosOptions opts = options;
  opts.count = 2;
  EigenPairs pairs = smallest_eigenpairs(op, opts);

  est.first_eigenvalue = pairs.values[0];
  est.second_eigenvalue = pairs.values[1];
  est.converged = pairs.converged;
  est.detected = est.second_eigenvalue < 0.0;
  est.eigenvector = std::move(pairs.vectors[1]);
  for (double x : est.eigenvector) {
    if (std::abs(x) > 1e-12) {
      if (x < 0.0) {
        for (double& y : est.eigenvector) y = -y;
      }
      break;
    }
  }
  est.localization = inverse_participation_ratio(est.eigenvector);
  est.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    est.labels[i] = est.eigenvector[i] >= 0.0 ? Label{1} : Label{-1};
  }
  return est;
}

}  // namespace sdpcd
