#include "sdpcd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sdpcd/dense_eigen.hpp"
#include "sdpcd/errors.hpp"
#include "sdpcd/solver.hpp"

namespace sdpcd {

double overlap(std::span<const Label> estimate, std::span<const Label> planted) {
  if (estimate.size() != planted.size()) {
    throw InvalidParameter("overlap: label vectors have different lengths");
  }
  if (estimate.empty()) return 0.0;
  long long agree = 0;
  for (std::size_t i = 0; i < estimate.size(); ++i) agree += estimate[i] * planted[i];
  return static_cast<double>(std::llabs(agree)) / static_cast<double>(estimate.size());
}

namespace {

void check_same_shape(const SpinConfig& a, const SpinConfig& b) {
  if (a.num_spins() != b.num_spins() || a.rank() != b.rank()) {
    throw InvalidParameter("configurations differ in shape");
  }
}

double mean_inner_product(const SpinConfig& a, const SpinConfig& b) {
  const auto x = a.values();
  const auto y = b.values();
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s / static_cast<double>(a.num_spins());
}

// (1/n) sum_i a_i1 b_i1
double mean_first_coordinate_product(const SpinConfig& a, const SpinConfig& b) {
  const std::size_t m = a.rank();
  const auto x = a.values();
  const auto y = b.values();
  double s = 0.0;
  for (std::size_t i = 0; i < a.num_spins(); ++i) s += x[i * m] * y[i * m];
  return s / static_cast<double>(a.num_spins());
}

}  // namespace

double clone_distance(const SpinConfig& a, const SpinConfig& b) {
  check_same_shape(a, b);
  if (a.num_spins() == 0) throw InvalidParameter("clone distance of empty configurations");
  return 0.5 * (1.0 - mean_inner_product(a, b));
}

AlignedConfig align_rotation(const SpinConfig& config) {
  const PrincipalComponent pc = principal_component(component_covariance(config));
  const std::size_t m = config.rank();
  std::vector<double> u = pc.direction;
  u[0] -= 1.0;
  double uu = 0.0;
  for (double x : u) uu += x * x;

  AlignedConfig out{config, !pc.degenerate};
  if (uu < 1e-28) return out;
  const double scale = 2.0 / uu;
  for (std::size_t i = 0; i < config.num_spins(); ++i) {
    auto x = out.config.spin(i);
    double ux = 0.0;
    for (std::size_t k = 0; k < m; ++k) ux += u[k] * x[k];
    ux *= scale;
    for (std::size_t k = 0; k < m; ++k) x[k] -= ux * u[k];
  }
  out.config.refresh_magnetization();
  return out;
}

PairwiseDistances raw_pairwise_distances(std::span<const SpinConfig> clones) {
  PairwiseDistances out;
  out.num_clones = clones.size();
  for (std::size_t a = 0; a < clones.size(); ++a) {
    for (std::size_t b = a + 1; b < clones.size(); ++b) {
      out.distances.push_back(clone_distance(clones[a], clones[b]));
      out.flagged.push_back(false);
    }
  }
  return out;
}

double procrustes_distance(const SpinConfig& a, const SpinConfig& b) {
  check_same_shape(a, b);
  const std::size_t m = a.rank();
  const std::size_t n = a.num_spins();
  DenseMatrix cross(m);  // sum_i a_i b_i^T
  for (std::size_t i = 0; i < n; ++i) {
    auto x = a.spin(i);
    auto y = b.spin(i);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) cross(r, c) += x[r] * y[c];
    }
  }
  // Nuclear norm from the eigenvalues of cross^T cross.
  DenseMatrix gram(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = r; c < m; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += cross(k, r) * cross(k, c);
      gram(r, c) = gram(c, r) = s;
    }
  }
  double nuclear = 0.0;
  for (double ev : jacobi_eigen(gram).values) nuclear += std::sqrt(std::max(ev, 0.0));
  return 0.5 * (1.0 - nuclear / static_cast<double>(n));
}

PairwiseDistances aligned_pairwise_distances(std::span<const SpinConfig> clones,
                                             AlignmentMode mode) {
  if (clones.size() < 2) throw InvalidParameter("need at least two clones");
  for (const auto& c : clones) check_same_shape(clones.front(), c);

  PairwiseDistances out;
  out.num_clones = clones.size();
  if (mode == AlignmentMode::kProcrustes) {
    for (std::size_t a = 0; a < clones.size(); ++a) {
      for (std::size_t b = a + 1; b < clones.size(); ++b) {
        out.distances.push_back(procrustes_distance(clones[a], clones[b]));
        out.flagged.push_back(false);
      }
    }
    return out;
  }

  std::vector<AlignedConfig> aligned;
  aligned.reserve(clones.size());
  for (const auto& c : clones) aligned.push_back(align_rotation(c));
  for (std::size_t a = 0; a < aligned.size(); ++a) {
    for (std::size_t b = a + 1; b < aligned.size(); ++b) {
      double d = clone_distance(aligned[a].config, aligned[b].config);
      if (d > 0.5) d += mean_first_coordinate_product(aligned[a].config, aligned[b].config);
      out.distances.push_back(d);
      out.flagged.push_back(!aligned[a].reliable || !aligned[b].reliable);
    }
  }
  return out;
}

DistanceHistogram make_histogram(std::span<const double> values, bool aligned, std::size_t bins,
                                 double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw InvalidParameter("histogram needs bins >= 1 and hi > lo");
  DistanceHistogram h;
  h.aligned = aligned;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  }
  h.counts.assign(bins, 0);
  for (double v : values) {
    const double t = (v - lo) / (hi - lo) * static_cast<double>(bins);
    const auto bin = static_cast<std::size_t>(
        std::clamp(std::floor(t), 0.0, static_cast<double>(bins - 1)));
    ++h.counts[bin];
  }
  h.total = values.size();
  return h;
}

void write_histogram_csv(std::ostream& out, const DistanceHistogram& hist, bool header) {
  if (header) out << "bin_lo,bin_hi,count,aligned\n";
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    out << hist.edges[b] << ',' << hist.edges[b + 1] << ',' << hist.counts[b] << ','
        << (hist.aligned ? "true" : "false") << '\n';
  }
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidParameter("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace sdpcd
