#include "gaplab/chern.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gaplab {

namespace {
constexpr Complex kI{0.0, 1.0};
// Plaquettes are traversed counterclockwise in (k1, k2); with the repository's
// fiber conventions this makes one Landau level at b > 0 carry Chern +1.
constexpr double kOrientation = 1.0;
}  // namespace

std::vector<FiberProjection> frame_grid(const RationalFlux& flux, const SpectralIsland& island,
                                        const PotentialSpec& V, Backend backend,
                                        const FrameGridOptions& opts) {
  if (opts.kgrid1 < 8 || opts.kgrid2 < 8)
    throw std::invalid_argument("frame_grid: kgrid must be >= 8 per direction");
  KGrid grid{opts.kgrid1, opts.kgrid2, flux.q, /*offset=*/true};
  std::vector<FiberProjection> frames(grid.size());
  const int M = island.num_bands();

  parallel_for(grid.size(), opts.threads, [&](Eigen::Index idx) {
    const int i = static_cast<int>(idx % opts.kgrid1);
    const int j = static_cast<int>(idx / opts.kgrid1);
    const double k1 = grid.k1(i), k2 = grid.k2(j);
    FiberProjection fp;
    fp.flux = flux;
    if (backend == Backend::Lattice) {
      FiberOperator f = lattice_fiber(flux, k1, k2, V);
      fp.k = f.k;
      EighResult es = eigh(f.dense);
      fp.frame = es.vectors.middleCols(island.m_lo, M);
    } else {
      FiberOperator f = continuum_fiber(flux, k1, k2, V, opts.continuum_N);
      fp.k = f.k;
      EighResult low = lowest_eigenpairs(f.sparse, island.m_hi + 2, -1.0);
      fp.frame = low.vectors.middleCols(island.m_lo, M);
    }
    frames[idx] = std::move(fp);
  });
  return frames;
}

ChernEstimate chern_from_frames(const std::vector<FiberProjection>& frames, int n1, int n2) {
  const auto at = [&](int i, int j) -> const Matrix& {
    return frames[static_cast<std::size_t>(((j % n2 + n2) % n2)) * n1 + ((i % n1 + n1) % n1)]
        .frame;
  };
  const auto link = [&](int i, int j, int di, int dj) {
    return (at(i, j).adjoint() * at(i + di, j + dj)).determinant();
  };

  ChernEstimate est;
  est.method = "k-space";
  est.grid1 = n1;
  est.grid2 = n2;
  double sum = 0.0;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const Complex u1 = link(i, j, 1, 0);
      const Complex u2 = link(i + 1, j, 0, 1);
      const Complex u3 = link(i, j + 1, 1, 0);
      const Complex u4 = link(i, j, 0, 1);
      double mindet = std::min(std::min(std::abs(u1), std::abs(u2)),
                               std::min(std::abs(u3), std::abs(u4)));
      est.min_plaquette_det = std::min(est.min_plaquette_det, mindet);
      if (mindet < 1e-8)
        throw std::runtime_error(
            "chern_kspace: plaquette overlap determinant below 1e-8; grid too coarse / gap closing");
      sum += std::arg(u1 * u2 * std::conj(u3) * std::conj(u4));
    }
  }
  est.value = kOrientation * sum / kTwoPi;
  est.rounded = std::lround(est.value);
  est.residual = std::abs(est.value - static_cast<double>(est.rounded));
  return est;
}

ChernEstimate chern_kspace(const RationalFlux& flux, const SpectralIsland& island,
                           const PotentialSpec& V, Backend backend,
                           const FrameGridOptions& opts) {
  auto frames = frame_grid(flux, island, V, backend, opts);
  return chern_from_frames(frames, opts.kgrid1, opts.kgrid2);
}

ChernEstimate chern_realspace(const ProjectionKernel& kernel) {
  if (kernel.decay.alpha <= 0.0)
    throw std::runtime_error("chern_realspace: kernel not localized; island likely not gapped");
  const Eigen::Index n = kernel.dim();
  Matrix A(n, n), B(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point2 xi = kernel.site(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Point2 d = xi - kernel.site(j);
      A(i, j) = d.x() * kernel.K(i, j);
      B(i, j) = d.y() * kernel.K(i, j);
    }
  }
  const Matrix T = kI * kernel.K * (A * B - B * A);

  // the diagonal of T is Z^2-periodic; average it over the central magnetic cell
  const auto q = static_cast<int>(kernel.flux.q);
  Complex acc = 0.0;
  int cnt = 0;
  for (int x2 = 0; x2 < q; ++x2) {
    acc += T(kernel.site_index(0, x2), kernel.site_index(0, x2));
    ++cnt;
  }
  ChernEstimate est;
  est.method = "real-space";
  est.value = kOrientation * kTwoPi * (acc.real() / cnt);
  est.rounded = std::lround(est.value);
  est.residual = std::abs(est.value - static_cast<double>(est.rounded));
  return est;
}

GapLabel diophantine_label(const IslandTrack& track) {
  if (track.size() < 2)
    throw std::invalid_argument("diophantine_label: track must have at least 2 points");
  const Rational phi1 = track.fluxes[0].phi(), phi2 = track.fluxes[1].phi();
  const Rational i1 = track.ids(0), i2 = track.ids(1);
  const Rational slope = (i2 - i1) / (phi2 - phi1);
  if (!slope.is_integer())
    throw std::runtime_error("diophantine_label: non-integer slope " + slope.str() +
                             "; track crosses a gap closing");
  GapLabel label;
  label.c1 = slope.num();
  label.c0 = i1 - slope * phi1;
  for (std::size_t i = 2; i < track.size(); ++i) {
    const Rational predicted = label.c0 + slope * track.fluxes[i].phi();
    if (!(predicted == track.ids(i)))
      throw std::runtime_error(
          "diophantine_label: verification failed at flux " + track.fluxes[i].phi().str() +
          " (predicted I = " + predicted.str() + ", got " + track.ids(i).str() +
          "); track crosses a gap closing");
  }
  return label;
}

GapLabel tknn_label(std::int64_t bands_below, const RationalFlux& flux) {
  const std::int64_t q = flux.q, p = ((flux.p % q) + q) % q;
  std::vector<std::int64_t> sols;
  for (std::int64_t t = -q / 2; t <= q / 2; ++t)
    if (((t * p - bands_below) % q + q) % q == 0) sols.push_back(t);
  if (sols.empty())
    throw std::runtime_error("tknn_label: no Diophantine solution (inconsistent input)");
  if (sols.size() > 1) {
    std::ostringstream os;
    os << "tknn_label: ambiguous solution |t| = q/2 at flux " << flux.phi() << ":";
    for (auto t : sols) os << " " << t;
    throw std::runtime_error(os.str());
  }
  GapLabel label;
  label.c1 = sols[0];
  label.c0 = Rational(bands_below - sols[0] * flux.p, q);
  return label;
}

StredaReport streda_check(const IslandTrack& track, const GapLabel& label,
                          double chern_value) {
  if (track.size() < 3)
    throw std::invalid_argument("streda_check: track must have at least 3 points");
  StredaReport rep;
  rep.slopes_exact = true;
  for (std::size_t i = 1; i + 1 < track.size(); ++i) {
    const Rational slope = (track.ids(i + 1) - track.ids(i - 1)) /
                           (track.fluxes[i + 1].phi() - track.fluxes[i - 1].phi());
    rep.slopes.push_back(slope);
    if (!(slope == Rational(label.c1))) rep.slopes_exact = false;
    rep.max_dev_from_chern =
        std::max(rep.max_dev_from_chern, std::abs(slope.value() - chern_value));
  }
  return rep;
}

}  // namespace gaplab
