#ifndef GAPLAB_POTENTIAL_HPP
#define GAPLAB_POTENTIAL_HPP

#include <string>
#include <vector>

#include "gaplab/flux.hpp"

namespace gaplab {

enum class PotentialKind { None, Cosine, FourierList };

struct PotentialCoeff {
  int m1 = 0;
  int m2 = 0;
  double amplitude = 0.0;
};

// Periodic on-site/electric potential.
//
// Continuum backend: V(x) = sum_i a_i cos(2*pi m_i . x), Z^2-periodic.
// Lattice backend:   V(gamma) = sum_i a_i cos(pi m_i . gamma); the half-unit
// wavevectors make sublattice-commensurate potentials (e.g. the staggered
// potential m=(0,1)) expressible on integer sites, where a 2*pi convention
// would sample to a constant.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::None;
  std::vector<PotentialCoeff> coefficients;

  static PotentialSpec none() { return {}; }
  static PotentialSpec cosine(double amplitude);
  static PotentialSpec staggered(double amplitude);  // lattice m=(0,1)

  bool is_none() const { return kind == PotentialKind::None || coefficients.empty(); }
  double sup_bound() const;  // sum |a_i|
  int max_mode() const;      // max |m| component over coefficients

  double eval_continuum(const Point2& x) const;
  double eval_lattice(std::int64_t g1, std::int64_t g2) const;

  // site period of the lattice sampling along each axis (1 or 2 per parity)
  int lattice_period1() const;
  int lattice_period2() const;

  // Lattice fiber on a 1 x q magnetic cell needs period 1 along gamma_1 and
  // period dividing q along gamma_2; throws otherwise.
  void require_lattice_cell(std::int64_t q) const;
};

}  // namespace gaplab

#endif
