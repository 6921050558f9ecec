#include "gaplab/wannier.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace gaplab {

namespace {

constexpr Complex kI{0.0, 1.0};

Matrix zak_twist(const Matrix& frame, double k2, std::int64_t q) {
  Matrix out = frame;
  for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(q); ++s)
    out.row(s) *= std::exp(-kI * (k2 * static_cast<double>(s)));
  return out;
}

// align the orthonormal columns of `target_frame` to F: closest unitary
// rotation (polar factor of the overlap)
Matrix transport_step(const Matrix& target_frame, const Matrix& F, double& min_det) {
  Matrix B = target_frame.adjoint() * F;
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  min_det = std::min(min_det, std::abs(B.determinant()));
  return target_frame * (svd.matrixU() * svd.matrixV().adjoint());
}

// fractional power of a (numerically) unitary matrix with the det-phase
// branch pinned to `det_arg`
Matrix unitary_power(const Matrix& V, double t, double det_arg) {
  const Eigen::Index m = V.rows();
  if (m == 1) return (Matrix(1, 1) << std::exp(kI * (t * det_arg))).finished();
  const Complex detphase = std::exp(kI * (det_arg / static_cast<double>(m)));
  Matrix S = V / detphase;
  Eigen::ComplexEigenSolver<Matrix> es(S);
  Matrix W = es.eigenvectors();
  Vector powered(m);
  for (Eigen::Index l = 0; l < m; ++l)
    powered(l) = std::exp(kI * (t * std::arg(es.eigenvalues()(l))));
  return std::exp(kI * (t * det_arg / static_cast<double>(m))) *
         (W * powered.asDiagonal() * W.inverse());
}

}  // namespace

Matrix ZakFiberGrid::zak_frame(int i, int j) const {
  const auto& fp = frames[static_cast<std::size_t>(j) * grid.n1 + i];
  return zak_twist(fp.frame, fp.k.k2, flux.q);
}

ZakFiberGrid bfz_fibers(const RationalFlux& flux, const SpectralIsland& island,
                        const PotentialSpec& V, const FrameGridOptions& opts) {
  ZakFiberGrid z;
  z.flux = flux;
  z.m_lo = island.m_lo;
  z.m_hi = island.m_hi;
  z.grid = {opts.kgrid1, opts.kgrid2, flux.q, /*offset=*/true};
  z.frames = frame_grid(flux, island, V, Backend::Lattice, opts);

  for (const auto& fp : z.frames)
    if (fp.frame.cols() != island.num_bands())
      throw std::runtime_error("bfz_fibers: fiber rank changed across the grid");

  // quasi-periodicity of the Zak kernel: p^Z(k + G) = M_G p^Z(k) M_G^dag with
  // M_G = diag(e^{-i G.x}); checked against independently recomputed fibers
  const auto q = flux.q;
  double resid = 0.0;
  for (auto [i, j] : {std::pair<int, int>{0, 0}, {opts.kgrid1 / 2, opts.kgrid2 / 3}}) {
    const double k1 = z.grid.k1(i), k2 = z.grid.k2(j);
    for (auto [g1, g2] : {std::pair<double, double>{kTwoPi, 0.0}, {0.0, kTwoPi / q}}) {
      EighResult es = eigh(lattice_fiber(flux, k1 + g1, k2 + g2, V).dense);
      Matrix shifted = es.vectors.middleCols(island.m_lo, island.num_bands());
      Matrix pz_shift = zak_twist(shifted, k2 + g2, q);
      pz_shift = pz_shift * pz_shift.adjoint();
      Matrix pz = zak_twist(z.frames[static_cast<std::size_t>(j) * z.grid.n1 + i].frame, k2, q);
      pz = pz * pz.adjoint();
      Matrix mg = Matrix::Identity(q, q);
      for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(q); ++s)
        mg(s, s) = std::exp(-kI * (g2 * static_cast<double>(s)));
      resid = std::max(resid, (pz_shift - mg * pz * mg.adjoint()).cwiseAbs().maxCoeff());
    }
  }
  z.zak_certificate = resid;
  return z;
}

ChernEstimate chern_zak(const ZakFiberGrid& fibers) {
  const int n1 = fibers.grid.n1, n2 = fibers.grid.n2;
  const auto q = fibers.flux.q;
  Matrix mg = Matrix::Identity(q, q);
  for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(q); ++s)
    mg(s, s) = std::exp(-kI * (kTwoPi / static_cast<double>(q) * static_cast<double>(s)));
  const auto zak = [&](int i, int j) -> Matrix {
    Matrix f = fibers.zak_frame(((i % n1) + n1) % n1, ((j % n2) + n2) % n2);
    return (j >= n2) ? (mg * f).eval() : f;  // k2 wrap carries the twist
  };
  ChernEstimate est;
  est.method = "k-space-zak";
  est.grid1 = n1;
  est.grid2 = n2;
  double sum = 0.0;
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      const Complex u1 = (zak(i, j).adjoint() * zak(i + 1, j)).determinant();
      const Complex u2 = (zak(i + 1, j).adjoint() * zak(i + 1, j + 1)).determinant();
      const Complex u3 = (zak(i, j + 1).adjoint() * zak(i + 1, j + 1)).determinant();
      const Complex u4 = (zak(i, j).adjoint() * zak(i, j + 1)).determinant();
      double mindet = std::min(std::min(std::abs(u1), std::abs(u2)),
                               std::min(std::abs(u3), std::abs(u4)));
      est.min_plaquette_det = std::min(est.min_plaquette_det, mindet);
      if (mindet < 1e-8)
        throw std::runtime_error(
            "chern_zak: plaquette overlap determinant below 1e-8; grid too coarse / gap closing");
      sum += std::arg(u1 * u2 * std::conj(u3) * std::conj(u4));
    }
  est.value = sum / kTwoPi;
  est.rounded = std::lround(est.value);
  est.residual = std::abs(est.value - static_cast<double>(est.rounded));
  return est;
}

SmoothFrame smooth_frame(const ZakFiberGrid& fibers) {
  const int n1 = fibers.grid.n1, n2 = fibers.grid.n2;
  ChernEstimate ch = chern_from_frames(fibers.frames, n1, n2);
  if (ch.rounded != 0)
    throw std::runtime_error(
        "smooth_frame: topological obstruction: nonzero Chern number (Ch = " +
        std::to_string(ch.rounded) + ")");

  SmoothFrame sf;
  sf.flux = fibers.flux;
  sf.m_lo = fibers.m_lo;
  sf.m_hi = fibers.m_hi;
  sf.grid = fibers.grid;
  sf.frames.resize(fibers.frames.size());
  const auto eig = [&](int i, int j) -> const Matrix& {
    return fibers.frames[static_cast<std::size_t>(j) * n1 + i].frame;
  };
  const auto at = [&](int i, int j) -> Matrix& {
    return sf.frames[static_cast<std::size_t>(j) * n1 + i];
  };
  double min_det = 1.0;

  // transport along the k1 line at j = 0 and remove the loop holonomy
  at(0, 0) = eig(0, 0);
  for (int i = 1; i < n1; ++i) at(i, 0) = transport_step(eig(i, 0), at(i - 1, 0), min_det);
  {
    Matrix closed = transport_step(eig(0, 0), at(n1 - 1, 0), min_det);
    Matrix V0 = at(0, 0).adjoint() * closed;
    const double theta = std::arg(V0.determinant());
    for (int i = 1; i < n1; ++i)
      at(i, 0) *= unitary_power(V0, -static_cast<double>(i) / n1, theta);
  }

  // transport each column and remove the k2 seam holonomies; their det-phase
  // winding over the k1 loop is the Chern number, zero here by precondition
  std::vector<Matrix> seams(n1);
  std::vector<double> theta(n1);
  for (int i = 0; i < n1; ++i) {
    for (int j = 1; j < n2; ++j) at(i, j) = transport_step(eig(i, j), at(i, j - 1), min_det);
    Matrix closed = transport_step(eig(i, 0), at(i, n2 - 1), min_det);
    seams[i] = at(i, 0).adjoint() * closed;
    theta[i] = std::arg(seams[i].determinant());
    if (i > 0) theta[i] += kTwoPi * std::round((theta[i - 1] - theta[i]) / kTwoPi);
  }
  {
    double th0 = std::arg(seams[0].determinant());
    const double closure = th0 + kTwoPi * std::round((theta[n1 - 1] - th0) / kTwoPi);
    sf.boundary_winding = (closure - theta[0]) / kTwoPi;
  }
  if (std::abs(sf.boundary_winding) > 0.25)
    throw std::runtime_error(
        "smooth_frame: topological obstruction: nonzero Chern number (seam winding " +
        std::to_string(sf.boundary_winding) + ")");
  for (int i = 0; i < n1; ++i)
    for (int j = 1; j < n2; ++j)
      at(i, j) *= unitary_power(seams[i], -static_cast<double>(j) / n2, theta[i]);

  // certificate: overlap determinants between all adjacent nodes, with wrap
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const Matrix& f = at(i, j);
      min_det =
          std::min(min_det, std::abs((f.adjoint() * at((i + 1) % n1, j)).determinant()));
      min_det =
          std::min(min_det, std::abs((f.adjoint() * at(i, (j + 1) % n2)).determinant()));
    }
  sf.min_overlap_det = min_det;
  return sf;
}

double WannierFunction::norm() const {
  double acc = 0.0;
  for (const auto& v : values) acc += std::norm(v);
  return std::sqrt(acc);
}

DecayFit WannierFunction::decay_fit() const {
  std::map<long, double> env;
  for (int n = -W; n <= W; ++n)
    for (int m = -W; m <= W; ++m) {
      if (m == 0 && n == 0) continue;
      const double d = std::hypot(static_cast<double>(m), static_cast<double>(flux.q) * n);
      double vmax = 0.0;
      for (int s = 0; s < flux.q; ++s) vmax = std::max(vmax, std::abs(value(m, n, s)));
      long key = std::lround(d * 4096.0);
      auto it = env.find(key);
      if (it == env.end() || it->second < vmax) env[key] = vmax;
    }
  std::vector<std::pair<double, double>> pts;
  double tail = 0.0;
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    if (it->second >= tail) {
      tail = it->second;
      pts.emplace_back(it->first / 4096.0, it->second);
    }
  }
  std::reverse(pts.begin(), pts.end());
  return fit_exponential_decay(pts);
}

WannierSet wannier_functions(const SmoothFrame& frame, const WannierOptions& opts) {
  const auto q = frame.flux.q;
  const double b = frame.flux.b();
  const int n1 = frame.grid.n1, n2 = frame.grid.n2;
  const int M = frame.m_hi - frame.m_lo + 1;
  const int W = opts.window;
  if (2 * W >= std::min(n1, n2))
    throw std::invalid_argument("wannier_functions: support window needs a denser k grid");

  WannierSet ws;
  ws.flux = frame.flux;
  for (int jf = 0; jf < M; ++jf) {
    WannierFunction w;
    w.flux = frame.flux;
    w.W = W;
    w.values.assign(static_cast<std::size_t>(2 * W + 1) * (2 * W + 1) * q, Complex(0, 0));
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        const double k1 = frame.grid.k1(i), k2 = frame.grid.k2(j);
        const Matrix& xi = frame.frames[static_cast<std::size_t>(j) * n1 + i];
        for (int n = -W; n <= W; ++n)
          for (int m = -W; m <= W; ++m) {
            const double e1 = m, e2 = static_cast<double>(q) * n;
            const double base_phase = k1 * e1 + k2 * e2 - 0.5 * b * e1 * e2;
            for (int s = 0; s < q; ++s) {
              // phi(y_s, eta) = eta_1 s / 2 for the cell site y_s = (0, s)
              const Complex ph = std::exp(kI * (base_phase + 0.5 * b * e1 * s));
              w.values[w.index(m, n, s)] += ph * xi(s, jf);
            }
          }
      }
    const double norm = 1.0 / (static_cast<double>(n1) * n2);
    for (auto& v : w.values) v *= norm;
    ws.decay.push_back(w.decay_fit());
    ws.functions.push_back(std::move(w));
  }

  // orthonormality of the magnetic translates around the origin
  double resid = 0.0;
  const int C = opts.ortho_check_cells;
  for (int gn = -C; gn <= C; ++gn)
    for (int gm = -C; gm <= C; ++gm)
      for (int a = 0; a < M; ++a)
        for (int bb = 0; bb < M; ++bb) {
          Complex acc = 0.0;
          const auto& wb = ws.functions[bb];
          for (int n = -W; n <= W; ++n)
            for (int m = -W; m <= W; ++m)
              for (int s = 0; s < q; ++s) {
                const Point2 x = wb.position(m, n, s);
                const Complex t = translated_wannier_value(ws.functions[a], gm, gn, x);
                if (t != Complex(0, 0)) acc += std::conj(t) * wb.value(m, n, s);
              }
          const double expect = (gm == 0 && gn == 0 && a == bb) ? 1.0 : 0.0;
          resid = std::max(resid, std::abs(acc - expect));
        }
  ws.orthonormality_residual = resid;
  return ws;
}

Complex translated_wannier_value(const WannierFunction& w, int gm, int gn, const Point2& x) {
  const auto q = w.flux.q;
  const double b = w.flux.b();
  const Point2 gamma(gm, static_cast<double>(q) * gn);
  const Point2 y = x - gamma;
  const auto m = static_cast<int>(y.x());
  const auto y2 = static_cast<std::int64_t>(y.y());
  const auto n = static_cast<int>(std::floor(static_cast<double>(y2) / static_cast<double>(q)));
  const int s = static_cast<int>(y2 - q * n);
  if (std::abs(m) > w.W || std::abs(n) > w.W) return 0.0;
  const double phase = 0.5 * b * gamma.x() * gamma.y() + peierls_phase(x, gamma, b);
  return std::exp(kI * phase) * w.value(m, n, s);
}

PatchKernel reconstruct_kernel(const WannierSet& ws, int R) {
  PatchKernel k;
  k.R = R;
  k.flux = ws.flux;
  const Eigen::Index np = k.dim();
  k.K = Matrix::Zero(np, np);
  const auto q = ws.flux.q;
  const int W = ws.functions.empty() ? 0 : ws.functions[0].W;
  const int reach_m = W + R + 1;
  const int reach_n = W + static_cast<int>(R / q) + 1;
  Vector t(np);
  for (const auto& w : ws.functions)
    for (int gn = -reach_n; gn <= reach_n; ++gn)
      for (int gm = -reach_m; gm <= reach_m; ++gm) {
        bool nonzero = false;
        for (Eigen::Index idx = 0; idx < np; ++idx) {
          t(idx) = translated_wannier_value(w, gm, gn, k.site(idx));
          nonzero = nonzero || t(idx) != Complex(0, 0);
        }
        if (nonzero) k.K.selfadjointView<Eigen::Lower>().rankUpdate(t, 1.0);
      }
  k.K.triangularView<Eigen::StrictlyUpper>() =
      k.K.triangularView<Eigen::StrictlyLower>().adjoint();
  return k;
}

DecaySummary decay_profile(const WannierSet& ws) {
  DecaySummary s;
  if (ws.decay.empty()) return s;
  s.alpha_min = ws.decay[0].alpha;
  s.C_max = ws.decay[0].C;
  s.r2_min = ws.decay[0].r2;
  for (const auto& f : ws.decay) {
    s.alpha_min = std::min(s.alpha_min, f.alpha);
    s.C_max = std::max(s.C_max, f.C);
    s.r2_min = std::min(s.r2_min, f.r2);
  }
  return s;
}

}  // namespace gaplab
