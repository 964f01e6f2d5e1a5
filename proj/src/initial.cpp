#include "pnpf/initial.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "pnpf/errors.hpp"

namespace pnpf {

std::uint64_t CounterRng::bits(std::uint64_t seed, std::uint64_t counter) noexcept {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::next_uniform() noexcept {
  return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
}

ScalarField random_band_field(const GridPtr& grid, std::uint64_t seed,
                              std::uint64_t stream, int band) {
  const int d = grid->dim();
  if (band < 1 || 3 * band >= grid->points_per_axis()) {
    throw ConfigError("random_band.band must satisfy 1 <= band < N/3");
  }
  CounterRng rng(seed, stream);
  const double unit = 2.0 * std::numbers::pi / grid->box_length();
  std::vector<int> m(static_cast<std::size_t>(d), -band);
  std::vector<std::array<double, 3>> coords(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    for (int a = 0; a < d; ++a) coords[i][a] = grid->coordinate(i, a);
  }

  ScalarField out(grid, 0.0);
  while (true) {
    bool zero = true;
    for (int a = 0; a < d; ++a) zero = zero && m[a] == 0;
    if (!zero) {
      const double alpha = rng.next_symmetric();
      const double beta = rng.next_symmetric();
      for (std::size_t i = 0; i < grid->size(); ++i) {
        double phase = 0.0;
        for (int a = 0; a < d; ++a) phase += unit * m[a] * coords[i][a];
        out[i] += alpha * std::cos(phase) + beta * std::sin(phase);
      }
    }
    int a = d - 1;
    while (a >= 0 && m[a] == band) m[a--] = -band;
    if (a < 0) break;
    ++m[a];
  }
  return out;
}

ScalarField sine_mode(const GridPtr& grid, int axis, int mode) {
  const double k = 2.0 * std::numbers::pi * mode / grid->box_length();
  return ScalarField::sample(grid, [&](const std::array<double, 3>& x) {
    return std::sin(k * x[static_cast<std::size_t>(axis)]);
  });
}

void validate(const InitialCondition& ic, const GridSpec& grid) {
  using Kind = InitialCondition::Kind;
  if (ic.kind == Kind::SingleMode) {
    const auto& s = ic.single_mode;
    if (s.field != "n" && s.field != "p" && s.field != "theta" && s.field != "u" &&
        s.field != "v") {
      throw ConfigError("single_mode.field must be one of n, p, theta, u, v");
    }
    if (s.axis < 0 || s.axis >= grid.dim) {
      throw ConfigError("single_mode.axis out of range");
    }
    if (s.mode < 1 || 2 * s.mode >= grid.points_per_axis) {
      throw ConfigError("single_mode.mode must satisfy 1 <= mode < N/2");
    }
    if (!std::isfinite(s.amplitude)) throw ConfigError("single_mode.amplitude not finite");
  }
  if (ic.kind == Kind::RandomBand) {
    const auto& r = ic.random_band;
    if (r.band < 1 || 3 * r.band >= grid.points_per_axis) {
      throw ConfigError("random_band.band must satisfy 1 <= band < N/3");
    }
    if (!(r.amplitude >= 0.0) || !std::isfinite(r.amplitude)) {
      throw ConfigError("random_band.amplitude must be nonnegative");
    }
  }
}

State build_initial_state(const GridPtr& grid, const InitialCondition& ic,
                          double floor) {
  validate(ic, grid->spec());
  ScalarField n(grid, ic.background.n);
  ScalarField p(grid, ic.background.p);
  ScalarField theta(grid, ic.background.theta);

  using Kind = InitialCondition::Kind;
  if (ic.kind == Kind::SingleMode) {
    const auto& s = ic.single_mode;
    const ScalarField wave = sine_mode(grid, s.axis, s.mode);
    const double a = s.amplitude;
    if (s.field == "n") n.axpy(a, wave);
    if (s.field == "p") p.axpy(a, wave);
    if (s.field == "theta") theta.axpy(a, wave);
    if (s.field == "u" || s.field == "v") {
      n.axpy(0.5 * a, wave);
      p.axpy(s.field == "u" ? 0.5 * a : -0.5 * a, wave);
    }
  } else if (ic.kind == Kind::RandomBand) {
    const auto& r = ic.random_band;
    ScalarField* targets[] = {&n, &p, &theta};
    for (std::uint64_t stream = 0; stream < 3; ++stream) {
      const ScalarField f = random_band_field(grid, r.seed, stream, r.band);
      const double peak = f.max_abs();
      if (peak > 0.0) targets[stream]->axpy(r.amplitude / peak, f);
    }
  }
  return make_state(std::move(n), std::move(p), std::move(theta), floor);
}

}  // namespace pnpf
