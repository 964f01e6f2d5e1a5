#pragma once

// Initial data and the counter-based random stream.
//
// Stream: draw number c (0-based) of a seed is SplitMix64 applied to
// seed + (c + 1) * 0x9E3779B97F4A7C15 (mod 2^64); uniform doubles in [0, 1)
// take the top 53 bits. Stream s of a seed starts at counter s * 2^32.

#include <cstdint>
#include <string>

#include "pnpf/fields.hpp"

namespace pnpf {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), counter_(stream << 32) {}

  static std::uint64_t bits(std::uint64_t seed, std::uint64_t counter) noexcept;

  std::uint64_t next_bits() noexcept { return bits(seed_, counter_++); }
  /// Uniform on [0, 1).
  double next_uniform() noexcept;
  /// Uniform on [-1, 1).
  double next_symmetric() noexcept { return 2.0 * next_uniform() - 1.0; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

/// sum over integer wave vectors m != 0 with max_a |m_a| <= band of
/// alpha_m cos(k_m . x) + beta_m sin(k_m . x), coefficients uniform on
/// [-1, 1) drawn in lexicographic order of m (axis 0 slowest, each axis from
/// -band to band), alpha before beta. Throws ConfigError unless
/// 1 <= band and 3 band < N.
ScalarField random_band_field(const GridPtr& grid, std::uint64_t seed,
                              std::uint64_t stream, int band);

/// sin(2 pi mode x_axis / L)
ScalarField sine_mode(const GridPtr& grid, int axis, int mode);

struct Background {
  double n = 1.0;
  double p = 1.0;
  double theta = 1.0;
};

struct SingleModeIC {
  /// One of n, p, theta, u (n and p together), v (n up, p down).
  std::string field = "theta";
  int axis = 0;
  double amplitude = 1e-2;
  int mode = 1;
};

struct RandomBandIC {
  std::uint64_t seed = 1;
  /// Largest |deviation| of each of n, p, theta from the background.
  double amplitude = 1e-3;
  int band = 2;
};

struct InitialCondition {
  enum class Kind { Equilibrium, SingleMode, RandomBand };
  Kind kind = Kind::Equilibrium;
  SingleModeIC single_mode;
  RandomBandIC random_band;
  Background background;
};

void validate(const InitialCondition& ic, const GridSpec& grid);

/// Throws NonNeutralSource for a non-neutral background and
/// PositivityViolation for nonpositive data.
State build_initial_state(const GridPtr& grid, const InitialCondition& ic,
                          double floor = kDefaultPositivityFloor);

}  // namespace pnpf
