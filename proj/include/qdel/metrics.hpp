#pragma once

#include <functional>

#include "qdel/qlin.hpp"

namespace qdel {

/// Gauss-Legendre averaging over alpha^2 in [0,1]; exact for polynomials of
/// degree up to 2*node_count - 1. node_count must be at least 16.
struct AveragingRule {
  int node_count = 24;
};

/// Nodes and weights on [0,1] (weights sum to 1).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Computes (and caches) the Gauss-Legendre rule for the given node count.
const QuadratureRule& gauss_legendre_unit(int node_count);

/// Squared Hilbert-Schmidt distance Tr[(rho - sigma)^2].
double hs_distance(const DensityOperator& rho, const DensityOperator& sigma);

/// <phi|rho|phi> for a unit-trace single-qubit operator.
double fidelity_against_pure(const DensityOperator& rho, const PureQubitState& phi);

/// Integral of f over alpha^2 in [0,1] by Gauss-Legendre quadrature.
double average_over_alpha2(const std::function<double(double)>& f, AveragingRule rule = {});

/// max f - min f over a uniform alpha^2 grid including both endpoints;
/// values near zero certify input-state independence on the grid.
double universality_deviation(const std::function<double(double)>& f, int grid_size);

}  // namespace qdel
