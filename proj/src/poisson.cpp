#include "pnpf/poisson.hpp"

#include <cmath>

#include "pnpf/errors.hpp"

namespace pnpf::poisson {

void require_neutral(const ScalarField& v) {
  const double m = v.mean();
  if (!(std::abs(m) <= kNeutralityTolerance)) throw NonNeutralSource(m);
}

ScalarField inverse_laplacian(const ScalarField& g) {
  require_neutral(g);
  return Spectrum(g).apply(g.grid()->inverse_neg_laplacian_symbol());
}

ScalarField potential(const ScalarField& v) { return -inverse_laplacian(v); }

PoissonSolution solve(const ScalarField& v) {
  PoissonSolution out{potential(v), 0.0};
  out.residual_norm = norm(laplacian(out.phi) - v, NormKind::l2());
  return out;
}

}  // namespace pnpf::poisson
