#ifndef GAPLAB_CONFIG_HPP
#define GAPLAB_CONFIG_HPP

#include <string>
#include <vector>

#include "gaplab/fibers.hpp"
#include "gaplab/flux.hpp"
#include "gaplab/potential.hpp"

namespace gaplab {

// Run configuration, read from a plain-text "key = value" file with
// [sections]; unknown sections or keys are rejected.
struct RunConfig {
  Backend backend = Backend::Lattice;
  int qmax = 10;
  std::string out_dir = "out";
  int threads = 0;             // 0: hardware concurrency
  std::uint64_t seed = 0;      // accepted for schema completeness; every
                               // algorithm here is deterministic

  int kgrid1 = 32;
  int kgrid2 = 32;
  double delta_gap = 1e-3;

  int continuum_grid = 24;
  int continuum_bands = 4;

  PotentialSpec potential;
  FieldProfile field;

  int patch_radius = 12;
  int normgap_radius = 16;

  std::vector<double> epsilon_ladder = {0.02, 0.01, 0.005};
  std::vector<double> lambda_ladder = {0.02, 0.05, 0.1};
  std::vector<int> normgap_steps = {5, 6};
  int normgap_L0 = 120;

  std::vector<RationalFlux> track_fluxes = {{1, 5}, {1, 4}, {1, 3}};
  int track_band = 0;

  int wannier_kgrid = 32;
  int wannier_window = 10;
  double staggered_amplitude = 3.0;

  int adiabatic_window = 60;
  std::int64_t adiabatic_flux_denom = 600;

  int resolved_threads() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace gaplab

#endif
