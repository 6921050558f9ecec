#ifndef GAPLAB_REPORTS_HPP
#define GAPLAB_REPORTS_HPP

#include <string>
#include <vector>

#include "gaplab/chern.hpp"
#include "gaplab/spectral.hpp"
#include "gaplab/wannier.hpp"

namespace gaplab {

// deterministic number formatting for all data files ("%.12g")
std::string fmt(double v);

struct IslandRow {
  RationalFlux flux;
  int m_lo = 0, m_hi = 0;
  Rational ids;
  Rational c0;            // per-island label: (M - c1 p)/q
  std::int64_t c1 = 0;    // island Chern number
  double ch_residual = 0.0;
  // cumulative label of the gap above the island (colors the butterfly)
  std::int64_t gap_c1 = 0;
  Rational gap_c0;
  bool has_upper_gap = false;
  double gap_lo = 0.0, gap_hi = 0.0;
};

struct ButterflyData {
  std::vector<RationalFlux> fluxes;
  std::vector<std::vector<EnergyInterval>> bands;  // per flux, per band extents
  std::vector<IslandRow> rows;
  std::vector<std::string> failures;  // per-flux failure notes
};

void write_butterfly_csv(const ButterflyData& data, const std::string& path);
void write_labels_csv(const std::vector<IslandRow>& rows, const std::string& path);
void write_bandstructure_csv(const BandStructure& bs, const std::string& path);
void write_wannier_csv(const WannierSet& ws, const std::string& path);

// self-contained deterministic SVGs; the color map is keyed by the cumulative
// gap label c1 (gray at 0, warm ramp positive, cool ramp negative)
std::string butterfly_svg(const ButterflyData& data);
std::string wannier_diagram_svg(const ButterflyData& data);
std::string chern_color(std::int64_t c1);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace gaplab

#endif
