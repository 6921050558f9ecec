#ifndef GAPLAB_EXPERIMENTS_HPP
#define GAPLAB_EXPERIMENTS_HPP

#include <iosfwd>
#include <string>

#include "gaplab/adiabatic.hpp"
#include "gaplab/config.hpp"
#include "gaplab/reports.hpp"

namespace gaplab {

// Full Farey sweep: band extents, islands, per-island Chern numbers and
// labels, cumulative gap labels.  Per-flux failures are recorded, not fatal.
ButterflyData compute_butterfly(const RunConfig& cfg);

// Boundary-term decay of the eigenvalue counting function: compares the torus
// count (exact, IDS * L^2) with the patch count at a gap-interior energy,
// |Tr(chi_L P_torus) - Tr(chi_L P_patch)| / L^2 over the patch family.
struct LemmaDecay {
  double count_energy = 0.0;
  std::vector<int> L;
  std::vector<double> D;
  std::vector<double> ratios;  // D(2L)/D(L)
};

LemmaDecay mainlemma_decay(const RationalFlux& flux, const SpectralIsland& island,
                           const PotentialSpec& V, const std::vector<int>& L_list);

// CLI verbs.  Write data files under cfg.out_dir, print a human summary to
// `log`, and return 0 on success / 1 on a contract violation.
int run_butterfly(const RunConfig& cfg, std::ostream& log);
int run_streda(const RunConfig& cfg, std::ostream& log);
int run_normgap(const RunConfig& cfg, std::ostream& log);
int run_adiabatic(const RunConfig& cfg, std::ostream& log);
int run_wannier(const RunConfig& cfg, std::ostream& log);
int run_purify(const RunConfig& cfg, std::ostream& log);

int run_experiment(const std::string& name, const RunConfig& cfg, std::ostream& log);

}  // namespace gaplab

#endif
