#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gaplab/spectral.hpp"

using namespace gaplab;

TEST_CASE("zero-flux band structure is the single cosine band on [-4,4]") {
  BandStructureOptions opts;
  opts.kgrid1 = opts.kgrid2 = 16;
  BandStructure bs = band_structure(RationalFlux(0, 1), {}, Backend::Lattice, opts);
  REQUIRE(bs.nbands() == 1);
  CHECK(bs.band_min(0) == doctest::Approx(-4.0).epsilon(1e-10));
  CHECK(bs.band_max(0) == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("flux 1/2: two bands touching at E = 0") {
  BandStructure bs = band_structure(RationalFlux(1, 2), {}, Backend::Lattice, {});
  REQUIRE(bs.nbands() == 2);
  // the 32x32 grid hits the Dirac point exactly
  CHECK(std::abs(bs.band_max(0)) <= 1e-12);
  CHECK(std::abs(bs.band_min(1)) <= 1e-12);
  auto islands = detect_islands(bs, 0.1);
  REQUIRE(islands.size() == 1);
  CHECK(islands[0].m_lo == 0);
  CHECK(islands[0].m_hi == 1);
}

TEST_CASE("flux 1/3: three bands, two open gaps, exact IDS") {
  BandStructure bs = band_structure(RationalFlux(1, 3), {}, Backend::Lattice, {});
  REQUIRE(bs.nbands() == 3);
  auto islands = detect_islands(bs, 0.1);
  REQUIRE(islands.size() == 3);
  for (int m = 0; m < 3; ++m) {
    CHECK(islands[m].m_lo == m);
    CHECK(islands[m].m_hi == m);
    CHECK(ids_of_island(islands[m]) == Rational(1, 3));
  }
  CHECK(islands[0].upper_gap.has_value());
  CHECK(islands[0].upper_gap->width() > 1.0);  // main Hofstadter gap is wide
  CHECK_FALSE(islands[0].lower_gap.has_value());
  CHECK_FALSE(islands[2].upper_gap.has_value());
}

TEST_CASE("a delta_gap above the bandwidth lumps everything into one island") {
  BandStructure bs = band_structure(RationalFlux(1, 3), {}, Backend::Lattice, {});
  auto islands = detect_islands(bs, 100.0);
  REQUIRE(islands.size() == 1);
  CHECK(islands[0].num_bands() == 3);
  CHECK(ids_of_island(islands[0]) == Rational(1));
}

TEST_CASE("eigenvalue count is conserved across the grid") {
  BandStructure bs = band_structure(RationalFlux(2, 5), {}, Backend::Lattice, {});
  CHECK(bs.nbands() == 5);
  for (Eigen::Index r = 0; r < bs.energies.rows(); ++r)
    for (Eigen::Index m = 0; m + 1 < bs.nbands(); ++m)
      CHECK(bs.energies(r, m) <= bs.energies(r, m + 1) + 1e-14);
}

TEST_CASE("islands computed at kgrid n and 2n agree to a k-Lipschitz margin") {
  BandStructureOptions coarse, fine;
  coarse.kgrid1 = coarse.kgrid2 = 16;
  fine.kgrid1 = fine.kgrid2 = 32;
  BandStructure a = band_structure(RationalFlux(1, 5), {}, Backend::Lattice, coarse);
  BandStructure c = band_structure(RationalFlux(1, 5), {}, Backend::Lattice, fine);
  auto ia = detect_islands(a, 1e-3), ic = detect_islands(c, 1e-3);
  REQUIRE(ia.size() == ic.size());
  // per-band group velocity bound |dE/dk| <= 2(|..|) gives the refinement margin
  const double margin = 2.0 * kTwoPi / 16;
  for (std::size_t i = 0; i < ia.size(); ++i) {
    CHECK(std::abs(ia[i].e_min - ic[i].e_min) <= margin);
    CHECK(std::abs(ia[i].e_max - ic[i].e_max) <= margin);
  }
}

TEST_CASE("lowest Hofstadter island tracks across {1/5, 1/4, 1/3} with IDS = phi") {
  std::vector<RationalFlux> fluxes = {{1, 5}, {1, 4}, {1, 3}};
  BandStructure bs = band_structure(fluxes[0], {}, Backend::Lattice, {});
  SpectralIsland seed = island_containing(detect_islands(bs, 1e-3), 0);
  IslandTrack track = track_island(fluxes, {}, Backend::Lattice, seed, {});
  REQUIRE_FALSE(track.aborted);
  REQUIRE(track.size() == 3);
  CHECK(track.ids(0) == Rational(1, 5));
  CHECK(track.ids(1) == Rational(1, 4));
  CHECK(track.ids(2) == Rational(1, 3));
  for (const auto& isl : track.islands) CHECK(isl.num_bands() == 1);
  // q * IDS is the integer band count at every flux
  for (std::size_t i = 0; i < track.size(); ++i)
    CHECK((track.ids(i) * Rational(track.fluxes[i].q)).is_integer());
}

TEST_CASE("tracks abort when the bounding gap closes at flux 1/2") {
  // at phi = 1/2 the Hofstadter spectrum has no open gap: both the lowest
  // island and any mid-spectrum island lose their bounding gap there
  std::vector<RationalFlux> fluxes = {{2, 5}, {1, 2}};
  BandStructure bs = band_structure(fluxes[0], {}, Backend::Lattice, {});
  auto islands = detect_islands(bs, 1e-3);
  SpectralIsland lowest = island_containing(islands, 0);
  IslandTrack t1 = track_island(fluxes, {}, Backend::Lattice, lowest, {});
  CHECK(t1.aborted);
  CHECK(t1.last_good_flux == RationalFlux(2, 5));
  CHECK(t1.size() == 1);
}

TEST_CASE("single-flux track equals its seed") {
  BandStructure bs = band_structure(RationalFlux(1, 4), {}, Backend::Lattice, {});
  SpectralIsland seed = island_containing(detect_islands(bs, 1e-3), 0);
  IslandTrack track = track_island({RationalFlux(1, 4)}, {}, Backend::Lattice, seed, {});
  CHECK(track.size() == 1);
  CHECK(track.ids(0) == Rational(1, 4));
  CHECK_FALSE(track.aborted);
}

TEST_CASE("IDS additivity over disjoint islands") {
  BandStructure bs = band_structure(RationalFlux(1, 5), {}, Backend::Lattice, {});
  auto islands = detect_islands(bs, 1e-3);
  Rational total(0);
  for (const auto& isl : islands) total = total + ids_of_island(isl);
  CHECK(total == Rational(1));
}

TEST_CASE("continuum band structure finds the isolated lowest Landau band at 1/3") {
  BandStructureOptions opts;
  opts.kgrid1 = opts.kgrid2 = 8;
  opts.continuum_N = 12;
  opts.continuum_bands = 3;
  BandStructure bs = band_structure(RationalFlux(1, 3), {}, Backend::Continuum, opts);
  auto islands = detect_islands(bs, 0.5);
  REQUIRE(!islands.empty());
  CHECK(islands[0].m_lo == 0);
  CHECK(islands[0].m_hi == 0);
  CHECK(ids_of_island(islands[0]) == Rational(1, 3));
  // the uncertified top group is not reported for a truncated band set
  for (const auto& isl : islands) CHECK(isl.m_hi + 1 < bs.nbands());
}
