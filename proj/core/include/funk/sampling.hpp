#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "funk/field.hpp"

namespace funk {

/// Region of chart coordinates: an axis-aligned box [lo, hi]^n or a centred
/// ball of the given radius.
struct XDomain {
  enum class Kind { Box, Ball };
  Kind kind = Kind::Box;
  double lo = -1.0;
  double hi = 1.0;
  double radius = 1.0;

  static XDomain box(double lo, double hi) { return {Kind::Box, lo, hi, 0.0}; }
  static XDomain ball(double radius) { return {Kind::Ball, 0.0, 0.0, radius}; }

  bool contains(std::span<const double> x) const;
  /// Largest |<w, x>| over the region.
  double max_abs_linear(std::span<const double> w) const;
};

/// Fiber radii |y| in [r_min, r_max].
struct YAnnulus {
  double r_min = 0.5;
  double r_max = 2.0;
};

struct SamplingDomain {
  XDomain x;
  YAnnulus y;

  /// Parses "x:box(LO,HI);y:annulus(RMIN,RMAX)" or "x:ball(R);...". Either
  /// part may be omitted; omitted parts keep the values of `base`.
  static SamplingDomain parse(std::string_view text, const SamplingDomain& base);
  std::string to_string() const;
};

/// Counter-based stream: sample k of stream s under seed is generated by an
/// engine seeded from (seed, s, k), independent of every other sample.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::mt19937_64 engine_;
};

struct SampleSet {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  SamplingDomain domain;
  std::vector<PhasePoint> points;
};

/// x uniform in the domain region, y in a uniform direction with |y| uniform
/// in the annulus.
SampleSet draw_samples(const SamplingDomain& domain, int n, int count, std::uint64_t seed,
                       std::uint64_t stream = 0);

}  // namespace funk
