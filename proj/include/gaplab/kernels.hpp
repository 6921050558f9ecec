#ifndef GAPLAB_KERNELS_HPP
#define GAPLAB_KERNELS_HPP

#include <optional>
#include <vector>

#include "gaplab/samples.hpp"
#include "gaplab/spectral.hpp"

namespace gaplab {

struct DecayFit {
  double alpha = 0.0;  // fitted exponential rate
  double C = 0.0;      // prefactor
  double r2 = 0.0;     // goodness of the log-linear fit
  int n_points = 0;
};

// log-linear fit of max |value| per (rounded Euclidean) distance shell
DecayFit fit_exponential_decay(const std::vector<std::pair<double, double>>& shells);

// Real-space kernel K(x;x') on the centered square patch |x|_inf <= R,
// sites indexed row-major by (x2+R)*(2R+1)+(x1+R).
struct PatchKernel {
  int R = 0;
  RationalFlux flux;
  Matrix K;

  Eigen::Index dim() const { return static_cast<Eigen::Index>(2 * R + 1) * (2 * R + 1); }
  Eigen::Index site_index(int x1, int x2) const {
    return static_cast<Eigen::Index>(x2 + R) * (2 * R + 1) + (x1 + R);
  }
  Point2 site(Eigen::Index idx) const {
    int n = 2 * R + 1;
    return {static_cast<double>(static_cast<int>(idx % n) - R),
            static_cast<double>(static_cast<int>(idx / n) - R)};
  }
  std::vector<Eigen::Index> inner_indices(int r) const;  // |x|_inf <= r
  Matrix restricted(int r) const;                        // kernel on the inner patch
  DecayFit decay_fit(int max_sep) const;
};

struct ProjectionKernel : PatchKernel {
  DecayFit decay;
  double hermiticity_residual = 0.0;
  double idempotency_residual = 0.0;  // on the inner half patch
};

struct AlmostProjection : PatchKernel {
  double epsilon = 0.0;
};

struct ProjectOptions {
  int torus_side = 0;      // 0: smallest multiple of q that is >= 4R
  bool use_fibers = true;  // synthesize from Bloch fibers (exact, fast); the
                           // dense route eigendecomposes the sample instead
  BandStructureOptions bands;
  double stray_margin = 0.1;  // fraction of each bounding gap kept clear
};

// Spectral projection onto the island's energy window on a lambda=0 torus of
// side >= 4R, restricted to the centered patch.  Both routes (fibered
// synthesis / dense eigendecomposition of the sample) agree to rounding.
ProjectionKernel project_island_kernel(const RationalFlux& flux, const SpectralIsland& island,
                                       const PotentialSpec& V, int R,
                                       const ProjectOptions& opts = {});

// Peierls-dressed kernel exp(i eps phi(x,x')) K(x,x'); Hermitian, diagonal
// unchanged.
AlmostProjection dress_kernel(const ProjectionKernel& kernel, double epsilon);

struct DefectReport {
  Matrix defect;              // patch-restricted (K~^2 - K~)
  double diag_sup = 0.0;      // sup |defect(x;x)| on the inner half patch
  double offdiag_sup = 0.0;   // sup |defect(x;x')| on the inner half patch
  double empirical_K = 0.0;   // sup |defect| e^{alpha |x-x'|} / |eps|
};

DefectReport defect_operator(const AlmostProjection& ap, const DecayFit& decay);

// P = K~ + (K~ - 1/2)((1 + 4 Delta)^{-1/2} - 1); spectral step of the
// almost-projection at 1/2, hence idempotent wherever the spectrum of
// 1 + 4 Delta stays away from zero.
ProjectionKernel purify_projection(const AlmostProjection& ap);

struct KatoNagyResult {
  Matrix U;
  double unitarity_residual = 0.0;
  double intertwining_residual = 0.0;
  double projection_distance = 0.0;  // ||P1 - P2|| on the patch
  DecayFit u_minus_one_decay;
};

// U = (1 - (P1-P2)^2)^{-1/2} (P1 P2 + (1-P1)(1-P2)); requires ||P1-P2|| < 1.
KatoNagyResult kato_nagy(const ProjectionKernel& P1, const ProjectionKernel& P2);

// |Tr(chi_L P1) - Tr(chi_L P2)| / L^2 over centered windows.
std::vector<double> trace_comparison(const PatchKernel& P1, const PatchKernel& P2,
                                     const std::vector<int>& L_list);

struct NormGapPoint {
  double epsilon = 0.0;
  RationalFlux shifted_flux;
  double patch_norm = 0.0;    // largest singular value on the inner half patch
  double strong_proxy = 0.0;  // ||(Pi' - Pi) delta_0||
};

struct NormGapReport {
  std::vector<NormGapPoint> points;
  ProjectionKernel base;
};

// Norm-discontinuity experiment: island kernels at flux and flux + eps/(2 pi)
// for the admissible increments eps = 2 pi s / L0; each flux point lives on
// its own commensurate torus (all approximate the infinite-lattice kernels).
NormGapReport norm_gap_experiment(const RationalFlux& flux, const SpectralIsland& island,
                                  std::int64_t c1, const PotentialSpec& V,
                                  const std::vector<int>& s_list, int R, int L0,
                                  const ProjectOptions& opts = {});

}  // namespace gaplab

#endif
