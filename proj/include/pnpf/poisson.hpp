#pragma once

// Periodic Poisson problem  Laplacian(phi) = v  in the zero-mean gauge.
//
// Solvable only for neutral sources (mean(v) = 0). Both entry points reject
// sources whose mean exceeds kNeutralityTolerance in absolute value.

#include "pnpf/grid.hpp"

namespace pnpf::poisson {

inline constexpr double kNeutralityTolerance = 1e-12;

struct PoissonSolution {
  ScalarField phi;
  /// L2 norm of Laplacian(phi) - v.
  double residual_norm = 0.0;
};

/// phi_hat = -v_hat / |k|^2 for k != 0, phi_hat(0) = 0.
PoissonSolution solve(const ScalarField& v);

/// Same potential as solve() without the residual evaluation.
ScalarField potential(const ScalarField& v);

/// (-Laplacian)^{-1} g on the zero-mean subspace.
ScalarField inverse_laplacian(const ScalarField& g);

/// Throws NonNeutralSource when |mean(v)| > kNeutralityTolerance.
void require_neutral(const ScalarField& v);

}  // namespace pnpf::poisson
