#include "gaplab/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gaplab {

double mean_flux(const FieldProfile& field) {
  field.validate();
  return field.mean;  // harmonics have zero cell average
}

WindowDensity window_ids(const SampleOperator& sample, const EnergyInterval& window,
                         int L_inner) {
  if (2 * L_inner > sample.L)
    throw std::invalid_argument("window_ids: window exceeds half the sample side");
  EighResult es = eigh(sample.dense());
  // guard against states at the window edges
  const double margin = 1e-9;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (std::abs(es.values(i) - window.lo) < margin || std::abs(es.values(i) - window.hi) < margin)
      throw std::runtime_error("window_ids: eigenvalue at the spectral window edge: " +
                               std::to_string(es.values(i)));

  const std::int64_t c1 = sample.lo.x() + (sample.L - L_inner) / 2;
  const std::int64_t c2 = sample.lo.y() + (sample.L - L_inner) / 2;
  double acc = 0.0;
  for (Eigen::Index n = 0; n < es.values.size(); ++n) {
    if (es.values(n) <= window.lo || es.values(n) >= window.hi) continue;
    for (std::int64_t y = c2; y < c2 + L_inner; ++y)
      for (std::int64_t x = c1; x < c1 + L_inner; ++x)
        acc += std::norm(es.vectors(sample.site_index(x, y), n));
  }
  WindowDensity w;
  w.L = L_inner;
  w.lambda = sample.lambda;
  w.value = acc / (static_cast<double>(L_inner) * L_inner);
  return w;
}

namespace {

// IDS of the labelled gap at a covariantly shifted flux (constant field):
// count the bands below the continued gap and verify it stays open.
double covariant_density(const RationalFlux& shifted, const Rational& c0, std::int64_t c1,
                         const PotentialSpec& V, const ExpansionOptions& opts) {
  const Rational bands = (c0 + Rational(c1) * shifted.phi()) * Rational(shifted.q);
  if (!bands.is_integer())
    throw std::runtime_error("expansion_fit: non-integer continued band count at flux " +
                             shifted.phi().str());
  BandStructureOptions bopts;
  bopts.kgrid1 = bopts.kgrid2 = std::max(8, opts.kgrid);
  bopts.threads = opts.threads;
  BandStructure bs = band_structure(shifted, V, Backend::Lattice, bopts);
  SpectralIsland isl = island_below_gap(bs, static_cast<int>(bands.num()), opts.delta_gap);
  return ids_of_island(isl).value();
}

// Exact superlattice fibering for an x1-periodic mean-zero field with integer
// period P = 1/lambda: Landau-type gauge a2(g1) = b g1 + G(g1) with G the
// cumulative perturbing plaquette flux (periodic because each period strip
// carries zero net flux).  Gauge-equivalent to the transverse-gauge sample;
// projection diagonals are gauge invariant.
double superlattice_density(const RationalFlux& base, const FieldProfile& field,
                            double lambda, const SpectralIsland& island, int window,
                            const ExpansionOptions& opts) {
  if (island.m_lo != 0)
    throw std::invalid_argument("expansion_fit: superlattice route needs an island anchored at band 0");
  // counting energy: midpoint of the upper bounding gap (spectrum top if absent)
  const bool has_upper = island.upper_gap.has_value();
  const double e_count = has_upper ? 0.5 * (island.upper_gap->lo + island.upper_gap->hi) : 1e300;
  const std::int64_t P = std::llround(1.0 / lambda);
  const std::int64_t Q = std::lcm(P, base.q);
  const double b = base.b();

  std::vector<double> G(Q + 1, 0.0);
  for (std::int64_t j = 0; j < Q; ++j)
    G[j + 1] = G[j] + plaquette_flux(field, lambda, static_cast<double>(j), 0.0);
  if (std::abs(G[std::min<std::int64_t>(P, Q)] - G[0]) > 1e-9)
    throw std::runtime_error(
        "expansion_fit: perturbing strip flux does not vanish over a period");

  const int n1 = std::max(4, opts.kgrid / 2), n2 = std::max(8, opts.kgrid);
  std::vector<double> diag(Q, 0.0);
  long bands_below = -1;
  double band_top = -1e300, band_next = 1e300;

  for (int i = 0; i < n1; ++i) {
    const double k1 = -0.5 * kTwoPi / Q + (kTwoPi / Q) * (i + 1) / n1;
    for (int j = 0; j < n2; ++j) {
      const double k2 = -0.5 * kTwoPi + kTwoPi * (j + 1) / n2;
      Matrix h = Matrix::Zero(Q, Q);
      for (std::int64_t s = 0; s < Q; ++s)
        h(s, s) = 2.0 * std::cos(k2 - (b * static_cast<double>(s) + G[s]));
      const Complex hop = std::exp(Complex(0, 1) * k1);
      for (std::int64_t s = 0; s < Q; ++s) {
        h((s + 1) % Q, s) += hop;
        h(s, (s + 1) % Q) += std::conj(hop);
      }
      EighResult es = eigh(h);
      long below = 0;
      while (below < Q && es.values(below) < e_count) ++below;
      if (bands_below < 0) bands_below = below;
      if (below != bands_below || below == 0)
        throw std::runtime_error("expansion_fit: band count below the gap varies across k");
      if (below < Q) band_next = std::min(band_next, es.values(below));
      band_top = std::max(band_top, es.values(below - 1));
      for (long n = 0; n < bands_below; ++n)
        for (std::int64_t s = 0; s < Q; ++s) diag[s] += std::norm(es.vectors(s, n));
    }
  }
  if (has_upper && band_next - band_top <= opts.delta_gap)
    throw std::runtime_error("expansion_fit: gap closed at lambda = " + std::to_string(lambda));
  const double nk = static_cast<double>(n1) * n2;
  for (auto& d : diag) d /= nk;

  // centered window average over whole field periods (a partial period would
  // add a first-order window artifact the infinite-volume theorem lacks);
  // the diagonal is g2-independent in this gauge
  const std::int64_t win = P * std::max<std::int64_t>(1, window / P);
  double acc = 0.0;
  for (std::int64_t g1 = -win / 2; g1 < (win + 1) / 2; ++g1)
    acc += diag[((g1 % Q) + Q) % Q];
  return acc / static_cast<double>(win);
}

}  // namespace

ExpansionReport expansion_fit(const RationalFlux& base, const SpectralIsland& island,
                              std::int64_t c1, const FieldProfile& field,
                              const PotentialSpec& V, const std::vector<double>& lambdas,
                              const ExpansionOptions& opts) {
  field.validate();
  if (lambdas.size() < 2)
    throw std::invalid_argument("expansion_fit: need at least two lambda values");

  ExpansionReport rep;
  rep.baseline = ids_of_island(island).value();
  rep.predicted_slope = mean_flux(field) * static_cast<double>(c1) / kTwoPi;
  const Rational c0 = ids_of_island(island) - Rational(c1) * base.phi();

  const bool x1_periodic_zero_mean =
      field.mean == 0.0 && !field.harmonics.empty() &&
      std::all_of(field.harmonics.begin(), field.harmonics.end(),
                  [](const FieldHarmonic& h) { return h.n2 == 0; });

  for (double lambda : lambdas) {
    ExpansionPoint pt;
    pt.lambda_target = lambda;
    if (field.is_constant()) {
      // H_{b,lambda} = H_{b + lambda <B>}: round so the shifted flux is rational
      const std::int64_t D = opts.flux_denom;
      const std::int64_t n = std::llround(lambda * field.mean * D / kTwoPi);
      if (n == 0)
        throw std::invalid_argument("expansion_fit: lambda " + std::to_string(lambda) +
                                    " rounds to a zero shift; increase flux_denom");
      pt.lambda_used = kTwoPi * n / (field.mean * D);
      RationalFlux shifted(base.p * D + base.q * n, base.q * D);
      pt.density = covariant_density(shifted, c0, c1, V, opts);
      pt.method = "covariant-flux-shift";
    } else if (x1_periodic_zero_mean && V.is_none()) {
      const std::int64_t P = std::llround(1.0 / lambda);
      if (P < 2)
        throw std::invalid_argument("expansion_fit: lambda too large for a slow field");
      pt.lambda_used = 1.0 / static_cast<double>(P);
      pt.density = superlattice_density(base, field, pt.lambda_used, island, opts.window, opts);
      pt.method = "superlattice-fibers";
    } else {
      // direct route: dense eigensolve of a torus sample (small windows only)
      const int L = 2 * opts.window;
      pt.lambda_used = admissible_lambda(field, lambda, L);
      SampleOperator s = sample_hamiltonian(L, base, pt.lambda_used, field, V, Geometry::Torus);
      pt.density = window_ids(s, island.energy_window(), opts.window).value;
      pt.method = "dense-sample";
    }
    rep.points.push_back(pt);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& pt : rep.points) {
    sx += pt.lambda_used;
    sy += pt.density;
    sxx += pt.lambda_used * pt.lambda_used;
    sxy += pt.lambda_used * pt.density;
  }
  const double n = static_cast<double>(rep.points.size());
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.intercept = (sy - rep.slope * sx) / n;
  for (const auto& pt : rep.points)
    rep.max_residual = std::max(
        rep.max_residual, std::abs(pt.density - rep.intercept - rep.slope * pt.lambda_used));
  return rep;
}

}  // namespace gaplab
