#include "gaplab/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace gaplab {

PotentialSpec PotentialSpec::cosine(double amplitude) {
  PotentialSpec v;
  v.kind = PotentialKind::Cosine;
  v.coefficients = {{1, 0, amplitude}, {0, 1, amplitude}};
  return v;
}

PotentialSpec PotentialSpec::staggered(double amplitude) {
  PotentialSpec v;
  v.kind = PotentialKind::FourierList;
  v.coefficients = {{0, 1, amplitude}};
  return v;
}

double PotentialSpec::sup_bound() const {
  double s = 0.0;
  for (const auto& c : coefficients) s += std::abs(c.amplitude);
  return s;
}

int PotentialSpec::max_mode() const {
  int m = 0;
  for (const auto& c : coefficients)
    m = std::max(m, std::max(std::abs(c.m1), std::abs(c.m2)));
  return m;
}

double PotentialSpec::eval_continuum(const Point2& x) const {
  if (is_none()) return 0.0;
  double v = 0.0;
  for (const auto& c : coefficients)
    v += c.amplitude * std::cos(kTwoPi * (c.m1 * x.x() + c.m2 * x.y()));
  return v;
}

double PotentialSpec::eval_lattice(std::int64_t g1, std::int64_t g2) const {
  if (is_none()) return 0.0;
  double v = 0.0;
  for (const auto& c : coefficients) {
    std::int64_t m = c.m1 * g1 + c.m2 * g2;
    // cos(pi*m) = +-1 on integer sites
    v += (m % 2 == 0) ? c.amplitude : -c.amplitude;
  }
  return v;
}

int PotentialSpec::lattice_period1() const {
  for (const auto& c : coefficients)
    if (c.m1 % 2 != 0) return 2;
  return 1;
}

int PotentialSpec::lattice_period2() const {
  for (const auto& c : coefficients)
    if (c.m2 % 2 != 0) return 2;
  return 1;
}

void PotentialSpec::require_lattice_cell(std::int64_t q) const {
  if (is_none()) return;
  if (lattice_period1() != 1)
    throw std::invalid_argument(
        "PotentialSpec: lattice potential varies along gamma_1 (odd m1); "
        "incommensurate with the 1 x q magnetic cell");
  if (q % lattice_period2() != 0)
    throw std::invalid_argument(
        "PotentialSpec: lattice potential period along gamma_2 does not divide q=" +
        std::to_string(q));
}

}  // namespace gaplab
