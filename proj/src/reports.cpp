#include "gaplab/reports.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gaplab {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << content;
}

void write_butterfly_csv(const ButterflyData& data, const std::string& path) {
  std::ostringstream os;
  os << "p,q,band,e_min,e_max\n";
  for (std::size_t f = 0; f < data.fluxes.size(); ++f)
    for (std::size_t m = 0; m < data.bands[f].size(); ++m)
      os << data.fluxes[f].p << "," << data.fluxes[f].q << "," << m << ","
         << fmt(data.bands[f][m].lo) << "," << fmt(data.bands[f][m].hi) << "\n";
  write_text_file(path, os.str());
}

void write_labels_csv(const std::vector<IslandRow>& rows, const std::string& path) {
  std::ostringstream os;
  os << "p,q,m_lo,m_hi,M,ids_num,ids_den,c0_num,c0_den,c1,ch_kspace_residual\n";
  for (const auto& r : rows)
    os << r.flux.p << "," << r.flux.q << "," << r.m_lo << "," << r.m_hi << ","
       << (r.m_hi - r.m_lo + 1) << "," << r.ids.num() << "," << r.ids.den() << ","
       << r.c0.num() << "," << r.c0.den() << "," << r.c1 << "," << fmt(r.ch_residual)
       << "\n";
  write_text_file(path, os.str());
}

void write_bandstructure_csv(const BandStructure& bs, const std::string& path) {
  std::ostringstream os;
  os << "k1,k2,band_index,energy\n";
  for (Eigen::Index idx = 0; idx < bs.energies.rows(); ++idx) {
    const int i = static_cast<int>(idx % bs.grid.n1);
    const int j = static_cast<int>(idx / bs.grid.n1);
    for (Eigen::Index m = 0; m < bs.nbands(); ++m)
      os << fmt(bs.grid.k1(i)) << "," << fmt(bs.grid.k2(j)) << "," << m << ","
         << fmt(bs.energies(idx, m)) << "\n";
  }
  write_text_file(path, os.str());
}

void write_wannier_csv(const WannierSet& ws, const std::string& path) {
  std::ostringstream os;
  os << "function,gamma1,gamma2,cell_index,re_w,im_w\n";
  for (std::size_t j = 0; j < ws.functions.size(); ++j) {
    const auto& w = ws.functions[j];
    for (int n = -w.W; n <= w.W; ++n)
      for (int m = -w.W; m <= w.W; ++m)
        for (int s = 0; s < w.flux.q; ++s) {
          Complex v = w.value(m, n, s);
          if (std::abs(v) < 1e-15) continue;
          os << j << "," << m << "," << w.flux.q * n << "," << s << "," << fmt(v.real())
             << "," << fmt(v.imag()) << "\n";
        }
  }
  write_text_file(path, os.str());
}

std::string chern_color(std::int64_t c1) {
  if (c1 == 0) return "#9e9e9e";
  // warm ramp for positive, cool ramp for negative, saturating at |c1| = 4
  static const char* warm[4] = {"#f6b26b", "#e69138", "#cc4125", "#990000"};
  static const char* cool[4] = {"#9fc5e8", "#6fa8dc", "#3d85c6", "#0b5394"};
  std::int64_t a = std::min<std::int64_t>(std::abs(c1), 4) - 1;
  return c1 > 0 ? warm[a] : cool[a];
}

namespace {

constexpr double kWidth = 1000.0, kHeight = 700.0;
constexpr double kMargin = 60.0;

double xpix(double phi) { return kMargin + phi * (kWidth - 2 * kMargin); }

std::string svg_header() {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
     << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"#ffffff\"/>\n";
  return os.str();
}

std::string axes(const std::string& xlabel, const std::string& ylabel) {
  std::ostringstream os;
  os << "<g stroke=\"#000000\" stroke-width=\"1\">\n"
     << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
     << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin << "\"/>\n"
     << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
     << "\" y2=\"" << kHeight - kMargin << "\"/>\n</g>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 15
     << "\" font-family=\"sans-serif\" font-size=\"16\">" << xlabel << "</text>\n"
     << "<text x=\"15\" y=\"" << kHeight / 2
     << "\" font-family=\"sans-serif\" font-size=\"16\" transform=\"rotate(-90 15 "
     << kHeight / 2 << ")\">" << ylabel << "</text>\n";
  return os.str();
}

std::string legend(const std::vector<std::int64_t>& c1s) {
  std::ostringstream os;
  double y = kMargin;
  os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::int64_t c : c1s) {
    os << "<rect x=\"" << kWidth - kMargin + 8 << "\" y=\"" << y
       << "\" width=\"14\" height=\"14\" fill=\"" << chern_color(c) << "\"/>\n"
       << "<text x=\"" << kWidth - kMargin + 26 << "\" y=\"" << y + 12 << "\">c1 = " << c
       << "</text>\n";
    y += 20;
  }
  os << "</g>\n";
  return os.str();
}

}  // namespace

std::string butterfly_svg(const ButterflyData& data) {
  double e_lo = -4.5, e_hi = 4.5;
  for (const auto& bandset : data.bands)
    for (const auto& b : bandset) {
      e_lo = std::min(e_lo, b.lo - 0.2);
      e_hi = std::max(e_hi, b.hi + 0.2);
    }
  const auto ypix = [&](double e) {
    return kHeight - kMargin - (e - e_lo) / (e_hi - e_lo) * (kHeight - 2 * kMargin);
  };
  // per-flux column half-width: half the distance to the nearest other flux
  const auto halfwidth = [&](std::size_t f) {
    double phi = data.fluxes[f].phi().value();
    double d = 1.0;
    for (std::size_t g = 0; g < data.fluxes.size(); ++g)
      if (g != f) d = std::min(d, std::abs(phi - data.fluxes[g].phi().value()));
    return std::max(0.45 * d * (kWidth - 2 * kMargin), 0.75);
  };

  std::ostringstream os;
  os << svg_header();
  // gap rectangles under the spectrum columns
  std::vector<std::int64_t> seen;
  for (std::size_t f = 0; f < data.fluxes.size(); ++f) {
    for (const auto& r : data.rows) {
      if (!(r.flux == data.fluxes[f]) || !r.has_upper_gap) continue;
      double x = xpix(r.flux.phi().value());
      double w = halfwidth(f);
      os << "<rect class=\"gap\" x=\"" << fmt(x - w) << "\" y=\"" << fmt(ypix(r.gap_hi))
         << "\" width=\"" << fmt(2 * w) << "\" height=\""
         << fmt(ypix(r.gap_lo) - ypix(r.gap_hi)) << "\" fill=\"" << chern_color(r.gap_c1)
         << "\"/>\n";
      if (std::find(seen.begin(), seen.end(), r.gap_c1) == seen.end())
        seen.push_back(r.gap_c1);
    }
  }
  // band segments
  os << "<g stroke=\"#000000\" stroke-width=\"1.5\">\n";
  for (std::size_t f = 0; f < data.fluxes.size(); ++f) {
    double x = xpix(data.fluxes[f].phi().value());
    for (const auto& b : data.bands[f])
      os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(ypix(b.lo)) << "\" x2=\"" << fmt(x)
         << "\" y2=\"" << fmt(ypix(std::max(b.hi, b.lo + 1e-3))) << "\"/>\n";
  }
  os << "</g>\n";
  std::sort(seen.begin(), seen.end());
  os << axes("flux per unit cell", "energy") << legend(seen) << "</svg>\n";
  return os.str();
}

std::string wannier_diagram_svg(const ButterflyData& data) {
  const auto ypix = [&](double ids) {
    return kHeight - kMargin - ids * (kHeight - 2 * kMargin);
  };
  std::ostringstream os;
  os << svg_header();
  // distinct gap label lines I = c0 + c1 phi, clipped to the unit square
  std::vector<std::pair<Rational, std::int64_t>> labels;
  for (const auto& r : data.rows) {
    if (!r.has_upper_gap) continue;
    auto lab = std::make_pair(r.gap_c0, r.gap_c1);
    if (std::find(labels.begin(), labels.end(), lab) == labels.end()) labels.push_back(lab);
  }
  std::sort(labels.begin(), labels.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  std::vector<std::int64_t> seen;
  for (const auto& [c0, c1] : labels) {
    // intersect I = c0 + c1 phi with [0,1]^2
    double phi_lo = 0.0, phi_hi = 1.0;
    if (c1 != 0) {
      double a = (0.0 - c0.value()) / c1, b = (1.0 - c0.value()) / c1;
      phi_lo = std::max(phi_lo, std::min(a, b));
      phi_hi = std::min(phi_hi, std::max(a, b));
    }
    if (phi_lo >= phi_hi) continue;
    double i_lo = c0.value() + c1 * phi_lo, i_hi = c0.value() + c1 * phi_hi;
    os << "<line x1=\"" << fmt(xpix(phi_lo)) << "\" y1=\"" << fmt(ypix(i_lo)) << "\" x2=\""
       << fmt(xpix(phi_hi)) << "\" y2=\"" << fmt(ypix(i_hi)) << "\" stroke=\""
       << chern_color(c1) << "\" stroke-width=\"1.5\"/>\n";
    if (std::find(seen.begin(), seen.end(), c1) == seen.end()) seen.push_back(c1);
  }
  // observed (phi, IDS-below-gap) points
  for (const auto& r : data.rows) {
    if (!r.has_upper_gap) continue;
    Rational below = r.gap_c0 + Rational(r.gap_c1) * r.flux.phi();
    os << "<circle cx=\"" << fmt(xpix(r.flux.phi().value())) << "\" cy=\""
       << fmt(ypix(below.value())) << "\" r=\"2.5\" fill=\"#000000\"/>\n";
  }
  std::sort(seen.begin(), seen.end());
  os << axes("flux per unit cell", "integrated density of states") << legend(seen)
     << "</svg>\n";
  return os.str();
}

}  // namespace gaplab
