#ifndef GAPLAB_WANNIER_HPP
#define GAPLAB_WANNIER_HPP

#include "gaplab/chern.hpp"

namespace gaplab {

// Island frames over the zone together with their Zak-twisted versions and
// the quasi-periodicity certificates of the Zak kernels.
struct ZakFiberGrid {
  RationalFlux flux;
  int m_lo = 0, m_hi = 0;
  KGrid grid;
  std::vector<FiberProjection> frames;  // Bloch-Floquet gauge, exactly periodic
  double zak_certificate = 0.0;  // residual of p^Z(k+G) = M_G p^Z(k) M_G^dag

  Matrix zak_frame(int i, int j) const;  // diag(e^{-i k.x}) * frame
};

ZakFiberGrid bfz_fibers(const RationalFlux& flux, const SpectralIsland& island,
                        const PotentialSpec& V, const FrameGridOptions& opts = {});

// Chern number of the Zak family, with the quasi-periodic k2 wrap twisted by
// M_G = diag(e^{-i (2 pi / q) x_2}); equals the Bloch-Floquet Chern number.
ChernEstimate chern_zak(const ZakFiberGrid& fibers);

// Periodic smooth frame from parallel transport (k1 lines, then k2 seam
// correction); construction succeeds iff the island's Chern number vanishes.
struct SmoothFrame {
  RationalFlux flux;
  int m_lo = 0, m_hi = 0;
  KGrid grid;
  std::vector<Matrix> frames;
  double min_overlap_det = 1.0;  // certificate over all adjacent node pairs
  double boundary_winding = 0.0; // det-phase winding of the k2 seam (must be 0)
};

SmoothFrame smooth_frame(const ZakFiberGrid& fibers);

// Exponentially localized Wannier functions from the discrete inverse
// Bloch-Floquet transform of a periodic frame,
//   w_j(y + eta) = (1/#k) sum_k e^{i k.eta} e^{-i b eta1 eta2/2} e^{i b phi(y,eta)} xi_j(k, y),
// on the window |eta_1| <= W, |eta_2| <= W q (eta in Z^2_(q)).
struct WannierFunction {
  RationalFlux flux;
  int W = 8;  // support window radius in magnetic cells
  std::vector<Complex> values;  // indexed by (cell m, cell n, site s)

  Eigen::Index index(int m, int n, int s) const {
    return (static_cast<Eigen::Index>(n + W) * (2 * W + 1) + (m + W)) * flux.q + s;
  }
  Complex value(int m, int n, int s) const { return values[index(m, n, s)]; }
  Point2 position(int m, int n, int s) const {
    return {static_cast<double>(m), static_cast<double>(flux.q * n + s)};
  }
  double norm() const;
  DecayFit decay_fit() const;  // envelope of max |w| per cell distance
};

struct WannierSet {
  RationalFlux flux;
  std::vector<WannierFunction> functions;
  std::vector<DecayFit> decay;
  double orthonormality_residual = 0.0;  // <tau_g w_i, tau_g' w_j> vs identity
};

struct WannierOptions {
  int window = 8;         // support window (magnetic cells)
  int ortho_check_cells = 2;
};

WannierSet wannier_functions(const SmoothFrame& frame, const WannierOptions& opts = {});

// (tau_{b,gamma} w)(x) = e^{i b g1 g2 / 2} e^{i b phi(x, gamma)} w(x - gamma),
// gamma = (m, q n) in Z^2_(q); evaluated on the stored window (tails dropped).
Complex translated_wannier_value(const WannierFunction& w, int gm, int gn,
                                 const Point2& x);

// Kernel reconstruction sum_j sum_gamma (tau_g w_j)(x) conj((tau_g w_j)(x'))
// on the centered patch of radius R.
PatchKernel reconstruct_kernel(const WannierSet& ws, int R);

struct DecaySummary {
  double alpha_min = 0.0;
  double C_max = 0.0;
  double r2_min = 0.0;
};

DecaySummary decay_profile(const WannierSet& ws);

}  // namespace gaplab

#endif
