#include "gaplab/kernels.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gaplab {

namespace {
constexpr Complex kI{0.0, 1.0};
}

DecayFit fit_exponential_decay(const std::vector<std::pair<double, double>>& shells) {
  DecayFit fit;
  std::vector<std::pair<double, double>> pts;
  for (const auto& [r, a] : shells)
    if (a > 1e-15) pts.emplace_back(r, std::log(a));
  fit.n_points = static_cast<int>(pts.size());
  if (pts.size() < 2) {
    // degenerate (delta-like) kernel: decay faster than anything measurable
    fit.alpha = 36.0;  // -log(1e-16)
    fit.C = pts.empty() ? 0.0 : std::exp(pts[0].second);
    fit.r2 = 1.0;
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double n = static_cast<double>(pts.size());
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  fit.alpha = -slope;
  fit.C = std::exp(intercept);
  double ss_res = 0, ss_tot = 0, ybar = sy / n;
  for (const auto& [x, y] : pts) {
    double e = y - (intercept + slope * x);
    ss_res += e * e;
    ss_tot += (y - ybar) * (y - ybar);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

std::vector<Eigen::Index> PatchKernel::inner_indices(int r) const {
  std::vector<Eigen::Index> idx;
  for (int x2 = -r; x2 <= r; ++x2)
    for (int x1 = -r; x1 <= r; ++x1) idx.push_back(site_index(x1, x2));
  return idx;
}

Matrix PatchKernel::restricted(int r) const {
  auto idx = inner_indices(r);
  Matrix out(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = K(idx[i], idx[j]);
  return out;
}

DecayFit PatchKernel::decay_fit(int max_sep) const {
  // envelope of |K| over exact separations; the magnetic kernel has
  // structural zeros (axis separations = 0 mod q), so fit the monotone
  // (Pareto) upper envelope, which is the object the bound C e^{-alpha r}
  // actually constrains
  std::map<long, double> env;
  const Eigen::Index n = dim();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point2 xi = site(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = (site(j) - xi).norm();
      if (d < 0.5 || d > max_sep + 1e-9) continue;
      long key = std::lround(d * 4096.0);
      double v = std::abs(K(i, j));
      auto it = env.find(key);
      if (it == env.end() || it->second < v) env[key] = v;
    }
  }
  std::vector<std::pair<double, double>> pts;
  double tail_max = 0.0;
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    if (it->second >= tail_max) {
      tail_max = it->second;
      pts.emplace_back(it->first / 4096.0, it->second);
    }
  }
  std::reverse(pts.begin(), pts.end());
  return fit_exponential_decay(pts);
}

namespace {

struct GapZones {
  std::vector<EnergyInterval> forbidden;  // shrunk bounding gaps
  EnergyInterval window;
};

GapZones gap_zones(const SpectralIsland& island, double margin) {
  GapZones z;
  z.window = island.energy_window();
  for (const auto& g : {island.lower_gap, island.upper_gap})
    if (g) {
      double w = g->width();
      z.forbidden.push_back({g->lo + margin * w, g->hi - margin * w});
    }
  return z;
}

int default_torus_side(const RationalFlux& flux, int R, int requested) {
  if (requested > 0) {
    if (requested % flux.q != 0)
      throw std::invalid_argument("project_island_kernel: torus side must be a multiple of q");
    return requested;
  }
  int L = 4 * R;
  L += (flux.q - L % flux.q) % flux.q;
  return L;
}

}  // namespace

ProjectionKernel project_island_kernel(const RationalFlux& flux, const SpectralIsland& island,
                                       const PotentialSpec& V, int R,
                                       const ProjectOptions& opts) {
  if (R < 6) throw std::invalid_argument("project_island_kernel: patch radius must be >= 6");
  if (!(island.flux == flux))
    throw std::invalid_argument("project_island_kernel: island belongs to a different flux");
  const int L = default_torus_side(flux, R, opts.torus_side);
  if (L < 2 * R + 2)
    throw std::invalid_argument("project_island_kernel: torus too small for the patch");

  const auto q = flux.q;
  const double b = flux.b();
  const GapZones zones = gap_zones(island, opts.stray_margin);

  ProjectionKernel out;
  out.R = R;
  out.flux = flux;
  const Eigen::Index np = out.dim();

  std::vector<double> strays;

  if (opts.use_fibers) {
    // exact Bloch synthesis: Pi(x;y) = (1/#cells) sum_k c_k(x) p_k(j_x, j_y) conj(c_k(y)),
    // with the inverse-transform phases c_k(ycell+eta) =
    //   e^{i k.eta} e^{-i b eta1 eta2/2} e^{i b phi(ycell,eta)}
    // and p_k the fiber projection onto the island's bands
    const int nk1 = L, nk2 = L / static_cast<int>(q);
    const int M = island.num_bands();
    const double norm = 1.0 / (static_cast<double>(nk1) * nk2);
    // per-site cell decomposition
    std::vector<Eigen::Index> cell_row(np);
    std::vector<Point2> etas(np), ycells(np);
    for (Eigen::Index idx = 0; idx < np; ++idx) {
      const Point2 x = out.site(idx);
      const double eta2 = q * std::floor(x.y() / static_cast<double>(q));
      etas[idx] = Point2(x.x(), eta2);
      ycells[idx] = Point2(0.0, x.y() - eta2);
      cell_row[idx] = static_cast<Eigen::Index>(ycells[idx].y());
    }
    out.K = Matrix::Zero(np, np);
    Vector c(np);
    for (int m = 0; m < nk1; ++m) {
      const double k1 = kTwoPi * m / L;
      for (int n = 0; n < nk2; ++n) {
        const double k2 = kTwoPi * n / L;
        EighResult es = eigh(lattice_fiber(flux, k1, k2, V).dense);
        for (Eigen::Index e = 0; e < es.values.size(); ++e)
          for (const auto& fz : zones.forbidden)
            if (es.values[e] > fz.lo && es.values[e] < fz.hi) strays.push_back(es.values[e]);
        for (Eigen::Index idx = 0; idx < np; ++idx) {
          const double phase = k1 * etas[idx].x() + k2 * etas[idx].y() -
                               0.5 * b * etas[idx].x() * etas[idx].y() +
                               peierls_phase(ycells[idx], etas[idx], b);
          c(idx) = std::exp(kI * phase);
        }
        Matrix Wk(np, M);
        for (Eigen::Index idx = 0; idx < np; ++idx)
          Wk.row(idx) = c(idx) * es.vectors.row(cell_row[idx]).segment(island.m_lo, M);
        out.K.selfadjointView<Eigen::Lower>().rankUpdate(Wk, norm);
      }
    }
    out.K.triangularView<Eigen::StrictlyUpper>() =
        out.K.triangularView<Eigen::StrictlyLower>().adjoint();
  } else {
    SampleOperator s = sample_hamiltonian(L, flux, 0.0, FieldProfile{}, V, Geometry::Torus,
                                          {-L / 2, -L / 2});
    EighResult es = eigh(s.dense());
    for (Eigen::Index e = 0; e < es.values.size(); ++e)
      for (const auto& fz : zones.forbidden)
        if (es.values[e] > fz.lo && es.values[e] < fz.hi) strays.push_back(es.values[e]);
    std::vector<Eigen::Index> sel;
    for (Eigen::Index e = 0; e < es.values.size(); ++e)
      if (es.values[e] > zones.window.lo && es.values[e] < zones.window.hi) sel.push_back(e);
    Matrix W(np, sel.size());
    for (Eigen::Index idx = 0; idx < np; ++idx) {
      const Point2 x = out.site(idx);
      const Eigen::Index si = s.site_index(static_cast<std::int64_t>(x.x()),
                                           static_cast<std::int64_t>(x.y()));
      for (std::size_t c = 0; c < sel.size(); ++c) W(idx, c) = es.vectors(si, sel[c]);
    }
    out.K = W * W.adjoint();
  }

  if (!strays.empty()) {
    std::ostringstream os;
    os << "project_island_kernel: energy window ambiguous on the finite sample; "
          "stray eigenvalues inside the gap:";
    for (std::size_t i = 0; i < std::min<std::size_t>(strays.size(), 8); ++i)
      os << " " << strays[i];
    throw std::runtime_error(os.str());
  }

  out.hermiticity_residual = (out.K - out.K.adjoint()).cwiseAbs().maxCoeff();
  out.K = 0.5 * (out.K + out.K.adjoint().eval());
  out.decay = out.decay_fit(std::max(2, R / 2));
  Matrix D = (out.K * out.K - out.K);
  auto inner = out.inner_indices(R / 2);
  double res = 0.0;
  for (auto i : inner)
    for (auto j : inner) res = std::max(res, std::abs(D(i, j)));
  out.idempotency_residual = res;
  return out;
}

AlmostProjection dress_kernel(const ProjectionKernel& kernel, double epsilon) {
  AlmostProjection ap;
  ap.R = kernel.R;
  ap.flux = kernel.flux;
  ap.epsilon = epsilon;
  ap.K = kernel.K;
  const Eigen::Index n = ap.dim();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point2 xi = ap.site(i);
    for (Eigen::Index j = 0; j < n; ++j)
      ap.K(i, j) *= std::exp(kI * peierls_phase(xi, ap.site(j), epsilon));
  }
  return ap;
}

DefectReport defect_operator(const AlmostProjection& ap, const DecayFit& decay) {
  DefectReport rep;
  rep.defect = ap.K * ap.K - ap.K;
  const auto inner = ap.inner_indices(ap.R / 2);
  for (auto i : inner) {
    const Point2 xi = ap.site(i);
    for (auto j : inner) {
      const double v = std::abs(rep.defect(i, j));
      if (i == j) {
        rep.diag_sup = std::max(rep.diag_sup, v);
      } else {
        rep.offdiag_sup = std::max(rep.offdiag_sup, v);
      }
      if (ap.epsilon != 0.0) {
        const double r = (ap.site(j) - xi).norm();
        rep.empirical_K =
            std::max(rep.empirical_K, v * std::exp(decay.alpha * r) / std::abs(ap.epsilon));
      }
    }
  }
  return rep;
}

ProjectionKernel purify_projection(const AlmostProjection& ap) {
  const Matrix delta = ap.K * ap.K - ap.K;
  EighResult es = eigh(delta);
  const double min_eig = 1.0 + 4.0 * es.values.minCoeff();
  if (min_eig < 1e-12)
    throw std::runtime_error(
        "purify_projection: spectrum of 1 + 4*Delta touches 0; eps too large for purification");
  RealVector f = (1.0 + 4.0 * es.values.array()).rsqrt();
  const Eigen::Index n = ap.dim();
  Matrix corr = es.vectors * (f.array() - 1.0).matrix().asDiagonal() * es.vectors.adjoint();
  Matrix P = ap.K + (ap.K - 0.5 * Matrix::Identity(n, n)) * corr;

  ProjectionKernel out;
  out.R = ap.R;
  out.flux = ap.flux;
  out.hermiticity_residual = (P - P.adjoint()).cwiseAbs().maxCoeff();
  out.K = 0.5 * (P + P.adjoint().eval());
  out.decay = out.decay_fit(std::max(2, ap.R / 2));
  Matrix D = out.K * out.K - out.K;
  auto inner = out.inner_indices(ap.R / 2);
  double res = 0.0;
  for (auto i : inner)
    for (auto j : inner) res = std::max(res, std::abs(D(i, j)));
  out.idempotency_residual = res;
  return out;
}

KatoNagyResult kato_nagy(const ProjectionKernel& P1, const ProjectionKernel& P2) {
  if (P1.R != P2.R) throw std::invalid_argument("kato_nagy: patch mismatch");
  const Eigen::Index n = P1.dim();
  const Matrix D = P1.K - P2.K;
  EighResult es = eigh(D);
  const double dist = es.values.cwiseAbs().maxCoeff();
  KatoNagyResult res;
  res.projection_distance = dist;
  if (dist >= 1.0 - 1e-12)
    throw std::runtime_error("kato_nagy: projections too far; no Kato-Nagy unitary (||P1-P2|| = " +
                             std::to_string(dist) + ")");
  RealVector g = (1.0 - es.values.array().square()).rsqrt();
  Matrix Ginv = es.vectors * g.asDiagonal() * es.vectors.adjoint();
  const Matrix I = Matrix::Identity(n, n);
  res.U = Ginv * (P1.K * P2.K + (I - P1.K) * (I - P2.K));
  res.unitarity_residual = (res.U.adjoint() * res.U - I).cwiseAbs().maxCoeff();
  res.intertwining_residual = (res.U * P2.K * res.U.adjoint() - P1.K).cwiseAbs().maxCoeff();
  PatchKernel w;
  w.R = P1.R;
  w.flux = P1.flux;
  w.K = res.U - I;
  res.u_minus_one_decay = w.decay_fit(std::max(2, P1.R / 2));
  return res;
}

std::vector<double> trace_comparison(const PatchKernel& P1, const PatchKernel& P2,
                                     const std::vector<int>& L_list) {
  std::vector<double> out;
  for (int L : L_list) {
    if (L / 2 > P1.R || L / 2 > P2.R)
      throw std::invalid_argument("trace_comparison: window exceeds patch");
    Complex t1 = 0, t2 = 0;
    for (int x2 = -L / 2; x2 < (L + 1) / 2; ++x2)
      for (int x1 = -L / 2; x1 < (L + 1) / 2; ++x1) {
        t1 += P1.K(P1.site_index(x1, x2), P1.site_index(x1, x2));
        t2 += P2.K(P2.site_index(x1, x2), P2.site_index(x1, x2));
      }
    out.push_back(std::abs(t1 - t2) / (static_cast<double>(L) * L));
  }
  return out;
}

NormGapReport norm_gap_experiment(const RationalFlux& flux, const SpectralIsland& island,
                                  std::int64_t c1, const PotentialSpec& V,
                                  const std::vector<int>& s_list, int R, int L0,
                                  const ProjectOptions& opts) {
  if (L0 % flux.q != 0)
    throw std::invalid_argument("norm_gap_experiment: L0 must be a multiple of q");
  // admissible increments eps = 2 pi s / L0; each flux point gets its own
  // torus (a multiple of its reduced denominator, >= 4R), all of which
  // approximate the same infinite-lattice projections
  ProjectOptions base_opts = opts;
  base_opts.torus_side = 0;
  NormGapReport rep;
  rep.base = project_island_kernel(flux, island, V, R, base_opts);
  const Eigen::Index center = rep.base.site_index(0, 0);

  for (int s : s_list) {
    NormGapPoint pt;
    pt.epsilon = kTwoPi * s / L0;
    if (s == 0) {
      pt.shifted_flux = flux;
      rep.points.push_back(pt);
      continue;
    }
    pt.shifted_flux =
        RationalFlux(flux.p * L0 + flux.q * s, flux.q * static_cast<std::int64_t>(L0));
    // continue the labelled gap: I = c0 + c1*phi fixes the band count below
    // the bounding gap at the shifted flux (internal mini-gaps are free)
    const Rational c0 = island.flux.phi() * Rational(-c1) + ids_of_island(island);
    const Rational bands_below = (c0 + Rational(c1) * pt.shifted_flux.phi()) *
                                 Rational(pt.shifted_flux.q);
    if (!bands_below.is_integer())
      throw std::logic_error("norm_gap_experiment: non-integer continued band count");
    BandStructure bs = band_structure(pt.shifted_flux, V, Backend::Lattice, opts.bands);
    SpectralIsland shifted =
        island_below_gap(bs, static_cast<int>(bands_below.num()), 1e-3);
    ProjectOptions shift_opts = opts;
    shift_opts.torus_side = 0;
    ProjectionKernel shifted_kernel = project_island_kernel(pt.shifted_flux, shifted, V, R, shift_opts);

    // both kernels are synthesized exactly on their tori, so the full patch
    // carries no truncation artifacts and is the right window for the norm;
    // the difference is Hermitian, so the largest singular value is the
    // spectral radius
    pt.patch_norm = eigvals(shifted_kernel.K - rep.base.K).cwiseAbs().maxCoeff();
    pt.strong_proxy = (shifted_kernel.K.col(center) - rep.base.K.col(center)).norm();
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace gaplab
