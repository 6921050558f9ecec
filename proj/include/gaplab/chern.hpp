#ifndef GAPLAB_CHERN_HPP
#define GAPLAB_CHERN_HPP

#include <vector>

#include "gaplab/kernels.hpp"
#include "gaplab/spectral.hpp"

namespace gaplab {

// Orthonormal frame spanning the island's fiber at one quasimomentum.
struct FiberProjection {
  Quasimomentum k;
  RationalFlux flux;
  Matrix frame;  // dim x M, orthonormal columns
};

struct ChernEstimate {
  double value = 0.0;    // raw plaquette sum / 2 pi
  long rounded = 0;
  double residual = 0.0; // |value - rounded|
  std::string method;
  int grid1 = 0, grid2 = 0;
  double min_plaquette_det = 1.0;
};

struct GapLabel {
  Rational c0;
  std::int64_t c1 = 0;
};

struct FrameGridOptions {
  int kgrid1 = 16;
  int kgrid2 = 16;
  int continuum_N = 24;
  int threads = 1;
};

// Island frames on a uniform grid over B_(q) (frame at grid node (i,j) stored
// at index j*n1+i); the fiber matrices are exactly periodic over the zone so
// plaquettes wrap by index.
std::vector<FiberProjection> frame_grid(const RationalFlux& flux, const SpectralIsland& island,
                                        const PotentialSpec& V, Backend backend,
                                        const FrameGridOptions& opts = {});

// Link-variable (plaquette product of frame overlap determinants) Chern
// number of the island's fiber projection.  Orientation convention: a single
// Landau level at b > 0 carries Chern +1.
ChernEstimate chern_kspace(const RationalFlux& flux, const SpectralIsland& island,
                           const PotentialSpec& V, Backend backend,
                           const FrameGridOptions& opts = {});
ChernEstimate chern_from_frames(const std::vector<FiberProjection>& frames, int n1, int n2);

// Real-space Chern character 2 pi * tr_cell( i Pi [[X1,Pi],[X2,Pi]] ) from a
// patch-restricted projection kernel; the commutators have kernels
// (x_j - x'_j) Pi(x;x').
ChernEstimate chern_realspace(const ProjectionKernel& kernel);

// Exact-rational fit I(phi) = c0 + c1 phi through the first two track points,
// verified exactly at all remaining points; c1 must be an integer.
GapLabel diophantine_label(const IslandTrack& track);

// TKNN cross-check: the unique t with r = s q + t p, |t| <= q/2, for a gap
// with r bands below at flux p/q.  Used as an oracle, never as the primary.
GapLabel tknn_label(std::int64_t bands_below, const RationalFlux& flux);

struct StredaReport {
  std::vector<Rational> slopes;    // central differences at interior points
  bool slopes_exact = false;       // every slope equals c1 exactly
  double max_dev_from_chern = 0.0; // float comparison against chern_kspace
};

StredaReport streda_check(const IslandTrack& track, const GapLabel& label,
                          double chern_value);

}  // namespace gaplab

#endif
