#include "qdel/metrics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace qdel {

namespace {

// Legendre roots by Newton iteration on the recurrence, exploiting symmetry.
QuadratureRule compute_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = -p1 / pp;
      z += dz;
      if (std::abs(dz) < std::numeric_limits<double>::epsilon()) break;
    }
    // Map [-1,1] -> [0,1]; weight already includes the 1/2 Jacobian.
    const double w = 1.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + z);
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre_unit(int node_count) {
  if (node_count < 16) {
    throw std::invalid_argument("averaging rule requires at least 16 nodes");
  }
  static std::mutex mtx;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(node_count);
  if (it == cache.end()) it = cache.emplace(node_count, compute_gauss_legendre(node_count)).first;
  return it->second;
}

double hs_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.arity() != sigma.arity()) {
    throw std::invalid_argument("Hilbert-Schmidt distance requires equal arity");
  }
  const Eigen::MatrixXcd d = rho.matrix() - sigma.matrix();
  return (d * d).trace().real();
}

double fidelity_against_pure(const DensityOperator& rho, const PureQubitState& phi) {
  if (rho.arity() != 1) {
    throw std::invalid_argument("fidelity against a single qubit requires arity 1");
  }
  if (!rho.is_unit_trace()) {
    throw std::invalid_argument("fidelity requires a unit-trace operator");
  }
  Eigen::Vector2cd v;
  v << phi.alpha, phi.beta;
  return (v.adjoint() * rho.matrix() * v)(0, 0).real();
}

double average_over_alpha2(const std::function<double(double)>& f, AveragingRule rule) {
  const QuadratureRule& q = gauss_legendre_unit(rule.node_count);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) acc += q.weights[i] * f(q.nodes[i]);
  return acc;
}

double universality_deviation(const std::function<double(double)>& f, int grid_size) {
  if (grid_size < 3) throw std::invalid_argument("universality grid needs at least 3 points");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_size; ++i) {
    const double v = f(static_cast<double>(i) / (grid_size - 1));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

}  // namespace qdel
