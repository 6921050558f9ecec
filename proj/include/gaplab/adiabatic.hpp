#ifndef GAPLAB_ADIABATIC_HPP
#define GAPLAB_ADIABATIC_HPP

#include "gaplab/kernels.hpp"
#include "gaplab/samples.hpp"
#include "gaplab/spectral.hpp"

namespace gaplab {

// large-scale mean flux per unit area of the profile (closed form)
double mean_flux(const FieldProfile& field);

struct WindowDensity {
  int L = 0;          // window side
  double value = 0.0; // Tr(chi_L Pi) / L^2
  double lambda = 0.0;
};

// Diagonal sum of the spectral projection onto `window` over the centered
// L_inner x L_inner window of the sample, divided by L_inner^2.
WindowDensity window_ids(const SampleOperator& sample, const EnergyInterval& window,
                         int L_inner);

struct ExpansionPoint {
  double lambda_target = 0.0;
  double lambda_used = 0.0;  // admissibility-rounded, reported
  double density = 0.0;
  std::string method;
};

struct ExpansionReport {
  std::vector<ExpansionPoint> points;
  double intercept = 0.0;
  double slope = 0.0;
  double baseline = 0.0;        // I(Pi_{b,0})
  double predicted_slope = 0.0; // <B> c1 / (2 pi)
  double max_residual = 0.0;    // of the linear fit
};

struct ExpansionOptions {
  int window = 60;
  int kgrid = 12;            // fiber grid for the fast paths
  std::int64_t flux_denom = 600;  // rounding denominator for covariant shifts
  double delta_gap = 1e-3;
  int threads = 1;
};

// Window densities of the perturbed projection fitted to a + s*lambda.
// Constant fields use the exact covariance H_{b,lambda} = H_{b + lambda<B>}
// (lambda rounded so the shifted flux is rational, reported); x1-periodic
// mean-zero fields use an exact superlattice fibering with lambda rounded to
// an integer field period.  Both follow from gauge equivalence; window
// densities are gauge invariant.
ExpansionReport expansion_fit(const RationalFlux& base, const SpectralIsland& island,
                              std::int64_t c1, const FieldProfile& field,
                              const PotentialSpec& V, const std::vector<double>& lambdas,
                              const ExpansionOptions& opts = {});

}  // namespace gaplab

#endif
