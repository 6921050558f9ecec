#ifndef GAPLAB_SAMPLES_HPP
#define GAPLAB_SAMPLES_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gaplab/fibers.hpp"
#include "gaplab/flux.hpp"
#include "gaplab/potential.hpp"

namespace gaplab {

enum class Geometry { Torus, Patch };

// Finite lattice sample of the perturbed Hofstadter Hamiltonian
//   H(s,p) = exp(i [ b*phi(s,p) + phi_lambda(s,p) ]) on nearest neighbours + V,
// with the constant-field part in the symmetric gauge and the slowly varying
// part in the transverse gauge of the field profile.
//
// Torus geometry quotients by the magnetic translations over L*e_1, L*e_2;
// this requires integer total flux: b L^2 in 2*pi*Z for the constant part and
// the perturbing flux rounded to integer quanta (see admissible_lambda).
// The perturbing link phases are exact line integrals on interior edges; the
// seam edges are chosen so every plaquette carries the exact perturbing flux
// (zero-holonomy seam gauge).
struct SampleOperator {
  Geometry geometry = Geometry::Torus;
  int L = 0;
  Eigen::Vector2i lo{0, 0};  // lattice coordinate of site index 0
  RationalFlux flux;
  double lambda = 0.0;
  FieldProfile field;
  PotentialSpec V;
  SparseCMatrix H;

  Eigen::Index dim() const { return static_cast<Eigen::Index>(L) * L; }
  Eigen::Index site_index(std::int64_t g1, std::int64_t g2) const;
  Point2 site(Eigen::Index idx) const;
  Matrix dense() const { return Matrix(H); }
};

SampleOperator sample_hamiltonian(int L, const RationalFlux& flux, double lambda,
                                  const FieldProfile& field, const PotentialSpec& V,
                                  Geometry geometry,
                                  Eigen::Vector2i lo = {0, 0});

// Exact flux of lambda*B(lambda x) through the unit plaquette with lower-left
// corner (g1, g2); closed form for constant-plus-harmonic fields.
double plaquette_flux(const FieldProfile& field, double lambda, double g1, double g2);

// Total perturbing flux through the L x L torus.
double total_perturbing_flux(const FieldProfile& field, double lambda, int L);

// Nearest lambda' to lambda with integer perturbing flux quanta through the
// torus (Newton from the closed-form total flux).
double admissible_lambda(const FieldProfile& field, double lambda, int L);

// Line integral of the transverse-gauge potential of lambda*B(lambda .) along
// the straight segment from a to c (Gauss-Legendre, exact for our fields at
// the chosen order).
double perturbation_line_integral(const FieldProfile& field, double lambda,
                                  const Point2& a, const Point2& c);

// Magnetic translation by eta on a lambda=0 sample; `modified` adds the
// cocycle exp(i b eta1 eta2 / 2).  Commutes with the sample Hamiltonian.
Matrix magnetic_translation(const SampleOperator& sample, const Eigen::Vector2i& eta,
                            bool modified = true);

}  // namespace gaplab

#endif
