#ifndef GAPLAB_FLUX_HPP
#define GAPLAB_FLUX_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gaplab/rational.hpp"

namespace gaplab {

using Point2 = Eigen::Vector2d;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Reduced magnetic flux p/q per unit cell; field strength b = 2*pi*p/q in
// Planck units (e = hbar = c = 1, mass m = 1/2 so H = (P - bA)^2 + V).
struct RationalFlux {
  std::int64_t p = 0;
  std::int64_t q = 1;

  RationalFlux() = default;
  RationalFlux(std::int64_t p_, std::int64_t q_);
  explicit RationalFlux(const Rational& r) : RationalFlux(r.num(), r.den()) {}

  double b() const { return kTwoPi * static_cast<double>(p) / static_cast<double>(q); }
  Rational phi() const { return Rational(p, q); }

  friend bool operator==(const RationalFlux& a, const RationalFlux& b) {
    return a.p == b.p && a.q == b.q;
  }
  friend bool operator<(const RationalFlux& a, const RationalFlux& b) {
    return a.phi() < b.phi();
  }
};

// Antisymmetric Peierls phase b * (x'_1 x_2 - x'_2 x_1) / 2.
double peierls_phase(const Point2& x, const Point2& xp, double b);

// phi(x,y) + phi(y,x') - phi(x,x'); equals phi(x-y, y-x') identically.
double composition_defect(const Point2& x, const Point2& y, const Point2& xp);

// Magnetic field of the form <B> + sum_i amp_i * trig(2*pi n_i . x) with
// integer wavevectors n_i != 0, so the periodic part has zero cell average
// and the large-scale mean flux per unit area is exactly `mean`.
struct FieldHarmonic {
  int n1 = 0;
  int n2 = 0;
  double amplitude = 0.0;
  bool use_sin = false;  // cos by default
};

struct FieldProfile {
  double mean = 0.0;
  std::vector<FieldHarmonic> harmonics;

  static FieldProfile constant(double b0);

  double eval(const Point2& x) const;
  bool is_constant() const { return harmonics.empty(); }
  // sup |grad B|, from the closed form of the harmonics
  double lipschitz_bound() const;
  void validate() const;  // throws on a (0,0) wavevector
};

// Integral of lambda*B(lambda x) over the triangle <x,y,x'>, signed by the
// orientation of (x,y,x') (counterclockwise positive).  Adaptive midpoint
// subdivision to relative tolerance rel_tol.
double triangle_flux(const Point2& x, const Point2& y, const Point2& xp,
                     const FieldProfile& field, double lambda,
                     double rel_tol = 1e-8);

// All reduced fractions p/q in [0,1] with q <= qmax, ascending (Farey).
std::vector<RationalFlux> farey_fluxes(std::int64_t qmax);

}  // namespace gaplab

#endif
