#include "gaplab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gaplab {

double SpectralIsland::hull_distance(const SpectralIsland& other) const {
  return std::max(std::abs(e_min - other.e_min), std::abs(e_max - other.e_max));
}

EnergyInterval SpectralIsland::energy_window() const {
  double lo = lower_gap ? 0.5 * (lower_gap->lo + lower_gap->hi) : e_min - 1.0;
  double hi = upper_gap ? 0.5 * (upper_gap->lo + upper_gap->hi) : e_max + 1.0;
  return {lo, hi};
}

BandStructure band_structure(const RationalFlux& flux, const PotentialSpec& V,
                             Backend backend, const BandStructureOptions& opts) {
  if (opts.kgrid1 < 8 || opts.kgrid2 < 8)
    throw std::invalid_argument("band_structure: kgrid must be >= 8 per direction");

  BandStructure bs;
  bs.flux = flux;
  bs.backend = backend;
  bs.grid = {opts.kgrid1, opts.kgrid2, flux.q};

  const Eigen::Index nk = bs.grid.size();
  Eigen::Index nbands;
  if (backend == Backend::Lattice) {
    nbands = flux.q;
    bs.complete = true;
  } else {
    nbands = std::min<Eigen::Index>(opts.continuum_bands,
                                    flux.q * opts.continuum_N * opts.continuum_N);
    bs.complete = nbands == flux.q * opts.continuum_N * opts.continuum_N;
  }
  bs.energies.resize(nk, nbands);

  parallel_for(nk, opts.threads, [&](Eigen::Index idx) {
    const int i = static_cast<int>(idx % opts.kgrid1);
    const int j = static_cast<int>(idx / opts.kgrid1);
    const double k1 = bs.grid.k1(i), k2 = bs.grid.k2(j);
    try {
      if (backend == Backend::Lattice) {
        FiberOperator f = lattice_fiber(flux, k1, k2, V);
        bs.energies.row(idx) = eigvals(f.dense).transpose();
      } else {
        FiberOperator f = continuum_fiber(flux, k1, k2, V, opts.continuum_N);
        EighResult low = lowest_eigenpairs(f.sparse, static_cast<int>(nbands), -1.0);
        bs.energies.row(idx) = low.values.transpose();
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("band_structure: eigensolve failed at k = (" +
                               std::to_string(k1) + ", " + std::to_string(k2) +
                               "): " + e.what());
    }
  });
  return bs;
}

std::vector<SpectralIsland> detect_islands(const BandStructure& bs, double delta_gap) {
  if (delta_gap <= 0) throw std::invalid_argument("detect_islands: delta_gap must be > 0");
  const Eigen::Index nb = bs.nbands();
  std::vector<SpectralIsland> islands;
  int start = 0;
  for (Eigen::Index m = 0; m < nb; ++m) {
    const double hi = bs.band_max(m);
    const double gap_above = (m + 1 < nb) ? bs.band_min(m + 1) - hi : 0.0;
    const bool close_here = (m + 1 == nb) || gap_above > delta_gap;
    if (!close_here) continue;
    if (m + 1 == nb && !bs.complete) break;  // last group not certified isolated
    SpectralIsland isl;
    isl.flux = bs.flux;
    isl.m_lo = start;
    isl.m_hi = static_cast<int>(m);
    isl.e_min = bs.band_min(start);
    isl.e_max = hi;
    if (start > 0)
      isl.lower_gap = EnergyInterval{bs.band_max(start - 1), bs.band_min(start)};
    if (m + 1 < nb) isl.upper_gap = EnergyInterval{hi, bs.band_min(m + 1)};
    islands.push_back(isl);
    start = static_cast<int>(m) + 1;
  }
  return islands;
}

Rational ids_of_island(const SpectralIsland& island) {
  return Rational(island.num_bands(), island.flux.q);
}

SpectralIsland island_containing(const std::vector<SpectralIsland>& islands, int band) {
  for (const auto& isl : islands)
    if (band >= isl.m_lo && band <= isl.m_hi) return isl;
  throw std::runtime_error("island_containing: band " + std::to_string(band) +
                           " lies in no detected island (gap below delta_gap?)");
}

SpectralIsland island_below_gap(const BandStructure& bs, int bands_below, double delta_gap) {
  if (bands_below < 1 || bands_below > bs.nbands())
    throw std::invalid_argument("island_below_gap: band count out of range");
  SpectralIsland isl;
  isl.flux = bs.flux;
  isl.m_lo = 0;
  isl.m_hi = bands_below - 1;
  isl.e_min = bs.band_min(0);
  isl.e_max = bs.band_max(0);
  for (int m = 1; m < bands_below; ++m) isl.e_max = std::max(isl.e_max, bs.band_max(m));
  if (bands_below < bs.nbands()) {
    const double gap = bs.band_min(bands_below) - isl.e_max;
    if (gap <= delta_gap)
      throw std::runtime_error("island_below_gap: bounding gap above band " +
                               std::to_string(bands_below - 1) + " is closed (width " +
                               std::to_string(gap) + ") at flux " + bs.flux.phi().str());
    isl.upper_gap = EnergyInterval{isl.e_max, bs.band_min(bands_below)};
  }
  return isl;
}

IslandTrack track_island(const std::vector<RationalFlux>& fluxes, const PotentialSpec& V,
                         Backend backend, const SpectralIsland& seed,
                         const TrackOptions& opts) {
  if (fluxes.empty()) throw std::invalid_argument("track_island: empty flux list");
  for (std::size_t i = 1; i < fluxes.size(); ++i)
    if (!(fluxes[i - 1] < fluxes[i]))
      throw std::invalid_argument("track_island: fluxes must be strictly ascending");
  if (!(fluxes.front() == seed.flux))
    throw std::invalid_argument("track_island: seed island is not at the first flux");

  IslandTrack track;
  track.fluxes.push_back(fluxes.front());
  track.islands.push_back(seed);
  track.last_good_flux = fluxes.front();

  for (std::size_t i = 1; i < fluxes.size(); ++i) {
    BandStructure bs = band_structure(fluxes[i], V, backend, opts.bands);
    std::vector<SpectralIsland> cands = detect_islands(bs, opts.delta_gap);
    const SpectralIsland& prev = track.islands.back();
    if (cands.empty()) {
      track.aborted = true;
      track.abort_reason = "no island at flux " + fluxes[i].phi().str();
      return track;
    }
    std::size_t best = 0;
    double d_best = prev.hull_distance(cands[0]);
    double d_second = std::numeric_limits<double>::infinity();
    for (std::size_t c = 1; c < cands.size(); ++c) {
      double d = prev.hull_distance(cands[c]);
      if (d < d_best) {
        d_second = d_best;
        d_best = d;
        best = c;
      } else {
        d_second = std::min(d_second, d);
      }
    }
    if (cands.size() > 1 && d_second - d_best < opts.ambiguity_tol) {
      std::ostringstream os;
      os << "track_island: ambiguous match at flux " << fluxes[i].phi()
         << ": bands [" << cands[best].m_lo << "," << cands[best].m_hi << "] and another candidate both at Hausdorff distance "
         << d_best;
      throw std::runtime_error(os.str());
    }
    if (d_best > opts.max_jump) {
      track.aborted = true;
      track.abort_reason = "gap closed: Hausdorff jump " + std::to_string(d_best) +
                           " at flux " + fluxes[i].phi().str();
      return track;
    }
    track.max_hausdorff_jump = std::max(track.max_hausdorff_jump, d_best);
    track.fluxes.push_back(fluxes[i]);
    track.islands.push_back(cands[best]);
    track.last_good_flux = fluxes[i];
  }
  return track;
}

}  // namespace gaplab
