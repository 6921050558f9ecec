#ifndef GAPLAB_SPECTRAL_HPP
#define GAPLAB_SPECTRAL_HPP

#include <optional>
#include <vector>

#include "gaplab/eigensolve.hpp"
#include "gaplab/fibers.hpp"
#include "gaplab/rational.hpp"

namespace gaplab {

// Uniform half-open grid covering B_(q) = (-pi,pi] x (-pi/q,pi/q] exactly once.
struct KGrid {
  int n1 = 32;
  int n2 = 32;
  std::int64_t q = 1;
  // Half-step offset keeps the grid off high-symmetry lines where eigenframes
  // can jump discontinuously; band scans instead sample the zone edge so that
  // gap minima (band touchings) are hit exactly.
  bool offset = false;

  double k1(int i) const { return -0.5 * kTwoPi + kTwoPi * (i + 1 - 0.5 * offset) / n1; }
  double k2(int j) const {
    double period = kTwoPi / static_cast<double>(q);
    return -0.5 * period + period * (j + 1 - 0.5 * offset) / n2;
  }
  Eigen::Index size() const { return static_cast<Eigen::Index>(n1) * n2; }
};

struct BandStructure {
  RationalFlux flux;
  Backend backend = Backend::Lattice;
  KGrid grid;
  Eigen::MatrixXd energies;  // size() x nbands, ascending within each row
  bool complete = true;      // false when only the lowest bands were computed

  Eigen::Index nbands() const { return energies.cols(); }
  double band_min(Eigen::Index m) const { return energies.col(m).minCoeff(); }
  double band_max(Eigen::Index m) const { return energies.col(m).maxCoeff(); }
};

struct EnergyInterval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// Gapped group of bands [m_lo, m_hi]; absent gap interval means the island is
// bounded by the spectrum edge there (trivially open).
struct SpectralIsland {
  RationalFlux flux;
  int m_lo = 0;
  int m_hi = 0;
  std::optional<EnergyInterval> lower_gap;
  std::optional<EnergyInterval> upper_gap;
  double e_min = 0.0;
  double e_max = 0.0;

  int num_bands() const { return m_hi - m_lo + 1; }
  // Hausdorff distance between interval hulls
  double hull_distance(const SpectralIsland& other) const;
  // midpoint energy window between the bounding gaps
  EnergyInterval energy_window() const;
};

struct BandStructureOptions {
  int kgrid1 = 32;
  int kgrid2 = 32;
  int continuum_N = 24;
  int continuum_bands = 4;
  int threads = 1;
};

BandStructure band_structure(const RationalFlux& flux, const PotentialSpec& V,
                             Backend backend, const BandStructureOptions& opts = {});

// Maximal groups of bands separated by spectral gaps wider than delta_gap,
// measured as min-over-k of the next band minus max-over-k of the previous.
std::vector<SpectralIsland> detect_islands(const BandStructure& bs, double delta_gap);

// Integrated density of states M/q of an island (states per unit cell for the
// lattice backend, per unit area for the continuum one).
Rational ids_of_island(const SpectralIsland& island);

struct TrackOptions {
  double delta_gap = 1e-3;
  double max_jump = 1.0;        // Hausdorff continuation budget
  double ambiguity_tol = 1e-6;  // two candidates closer than this is an error
  BandStructureOptions bands;
};

struct IslandTrack {
  std::vector<RationalFlux> fluxes;
  std::vector<SpectralIsland> islands;
  double max_hausdorff_jump = 0.0;
  bool aborted = false;
  RationalFlux last_good_flux;
  std::string abort_reason;

  std::size_t size() const { return islands.size(); }
  Rational ids(std::size_t i) const { return ids_of_island(islands[i]); }
};

// Greedy continuation of `seed` (an island of the first flux) across the
// sorted flux list, matching islands between consecutive fluxes by minimal
// Hausdorff distance of their energy hulls.  A closing gap aborts the track
// and reports the last good flux; a nearly-tied match throws.
IslandTrack track_island(const std::vector<RationalFlux>& fluxes, const PotentialSpec& V,
                         Backend backend, const SpectralIsland& seed,
                         const TrackOptions& opts = {});

// Convenience: the island of `bs` whose band range starts at band 0 (lowest),
// or the island containing band `m`.
SpectralIsland island_containing(const std::vector<SpectralIsland>& islands, int band);

// The group of the lowest `bands_below` bands as one island, requiring the
// gap right above it to be open (internal mini-gaps may open or close freely).
// This is how a labelled gap is continued to another flux.
SpectralIsland island_below_gap(const BandStructure& bs, int bands_below, double delta_gap);

}  // namespace gaplab

#endif
