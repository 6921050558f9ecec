#include "gaplab/fibers.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace gaplab {

namespace {
constexpr Complex kI{0.0, 1.0};
}

Quasimomentum reduce_to_zone(double k1, double k2, std::int64_t q) {
  Quasimomentum k;
  double period2 = kTwoPi / static_cast<double>(q);
  k.k1 = std::remainder(k1, kTwoPi);
  if (k.k1 <= -0.5 * kTwoPi + 1e-15) k.k1 += kTwoPi;
  k.k2 = std::remainder(k2, period2);
  if (k.k2 <= -0.5 * period2 + 1e-15) k.k2 += period2;
  k.reduced = std::abs(k.k1 - k1) > 1e-12 || std::abs(k.k2 - k2) > 1e-12;
  return k;
}

const Matrix& FiberOperator::matrix() const {
  if (backend == Backend::Continuum && dense.size() == 0)
    throw std::logic_error("FiberOperator: continuum fiber stored sparse; use take_dense()");
  return dense;
}

Matrix FiberOperator::take_dense() const {
  if (dense.size() > 0) return dense;
  return Matrix(sparse);
}

double FiberOperator::hermiticity_residual() const {
  if (backend == Backend::Lattice) {
    double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
    return (dense - dense.adjoint()).cwiseAbs().maxCoeff() / scale;
  }
  SparseCMatrix d = SparseCMatrix(sparse.adjoint()) - sparse;
  double num = 0.0, scale = 1.0;
  for (int c = 0; c < d.outerSize(); ++c)
    for (SparseCMatrix::InnerIterator it(d, c); it; ++it)
      num = std::max(num, std::abs(it.value()));
  for (int c = 0; c < sparse.outerSize(); ++c)
    for (SparseCMatrix::InnerIterator it(sparse, c); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  return num / scale;
}

FiberOperator lattice_fiber(const RationalFlux& flux, double k1, double k2,
                            const PotentialSpec& V) {
  V.require_lattice_cell(flux.q);
  const auto q = static_cast<Eigen::Index>(flux.q);
  const double b = flux.b();

  FiberOperator f;
  f.backend = Backend::Lattice;
  f.flux = flux;
  f.k = reduce_to_zone(k1, k2, flux.q);
  f.dim = q;
  f.dense = Matrix::Zero(q, q);

  for (Eigen::Index j = 0; j < q; ++j)
    f.dense(j, j) = 2.0 * std::cos(f.k.k1 + b * static_cast<double>(j)) +
                    V.eval_lattice(0, j);
  for (Eigen::Index j = 0; j + 1 < q; ++j) {
    f.dense(j, j + 1) += 1.0;
    f.dense(j + 1, j) += 1.0;
  }
  const Complex closure = std::exp(-kI * (static_cast<double>(q) * f.k.k2));
  if (q == 1) {
    f.dense(0, 0) += closure + std::conj(closure);
  } else {
    f.dense(0, q - 1) += closure;
    f.dense(q - 1, 0) += std::conj(closure);
  }
  return f;
}

FiberOperator continuum_fiber(const RationalFlux& flux, double k1, double k2,
                              const PotentialSpec& V, int N) {
  if (N < 8) throw std::invalid_argument("continuum_fiber: N must be >= 8");
  for (const auto& c : V.coefficients) {
    int m = std::max(std::abs(c.m1), std::abs(c.m2));
    if (m > 0 && N < 4 * m)
      throw std::invalid_argument(
          "continuum_fiber: grid N=" + std::to_string(N) +
          " cannot resolve potential mode (" + std::to_string(c.m1) + "," +
          std::to_string(c.m2) + "); need N >= " + std::to_string(4 * m));
  }

  const auto q = flux.q;
  const double b = flux.b();
  const double h = 1.0 / static_cast<double>(N);
  const double hop = -1.0 / (h * h);
  const Eigen::Index dim = static_cast<Eigen::Index>(q) * N * N;

  FiberOperator f;
  f.backend = Backend::Continuum;
  f.flux = flux;
  f.k = reduce_to_zone(k1, k2, q);
  f.grid = N;
  f.dim = dim;

  const auto site = [&](int a, int c) -> Point2 {
    return {-0.5 + (a + 0.5) * h, -0.5 * static_cast<double>(q) + (c + 0.5) * h};
  };
  const auto index = [&](int a, int c) -> Eigen::Index {
    return static_cast<Eigen::Index>(c) * N + a;
  };
  const int rows2 = static_cast<int>(q) * N;

  // Bloch-Floquet fiber kernel: sum over eta in Z^2_(q) of
  //   exp(-i k.eta) exp(-i b eta1 eta2 / 2) exp(-i b phi(x,eta)) H(x+eta; y)
  // where the discretized H hops carry exp(i b phi(u,y)).
  const std::vector<std::pair<int, int>> etas = {
      {0, 0}, {1, 0}, {-1, 0}, {0, static_cast<int>(q)}, {0, -static_cast<int>(q)}};
  const std::vector<std::pair<int, int>> dirs = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(dim) * 6);

  for (int c = 0; c < rows2; ++c) {
    for (int a = 0; a < N; ++a) {
      const Eigen::Index row = index(a, c);
      const Point2 x = site(a, c);
      trip.emplace_back(row, row, Complex(4.0 / (h * h) + V.eval_continuum(x), 0.0));
      for (const auto& [e1, e2] : etas) {
        const Point2 eta(static_cast<double>(e1), static_cast<double>(e2));
        const Point2 u = x + eta;
        const Complex pref =
            std::exp(-kI * (f.k.k1 * eta.x() + f.k.k2 * eta.y())) *
            std::exp(-kI * (0.5 * b * eta.x() * eta.y())) *
            std::exp(-kI * peierls_phase(x, eta, b));
        for (const auto& [d1, d2] : dirs) {
          const int ay = a + e1 * N + d1;
          const int cy = c + e2 * N + d2;
          if (ay < 0 || ay >= N || cy < 0 || cy >= rows2) continue;
          const Point2 y = site(ay, cy);
          const Complex val = pref * hop * std::exp(kI * peierls_phase(u, y, b));
          trip.emplace_back(row, index(ay, cy), val);
        }
      }
    }
  }

  f.sparse.resize(dim, dim);
  f.sparse.setFromTriplets(trip.begin(), trip.end());
  // symmetrize away the last-bit roundoff so downstream solvers see an exact
  // Hermitian operator
  f.sparse = 0.5 * (SparseCMatrix(f.sparse.adjoint()) + f.sparse);
  return f;
}

void dump_matrix(const Matrix& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("dump_matrix: cannot open " + path);
  const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
  os.write(reinterpret_cast<const char*>(&rows), 8);
  os.write(reinterpret_cast<const char*>(&cols), 8);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re = m(i, j).real(), im = m(i, j).imag();
      os.write(reinterpret_cast<const char*>(&re), 8);
      os.write(reinterpret_cast<const char*>(&im), 8);
    }
}

Matrix load_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_matrix: cannot open " + path);
  std::uint64_t rows = 0, cols = 0;
  is.read(reinterpret_cast<char*>(&rows), 8);
  is.read(reinterpret_cast<char*>(&cols), 8);
  Matrix m(rows, cols);
  for (std::uint64_t i = 0; i < rows; ++i)
    for (std::uint64_t j = 0; j < cols; ++j) {
      double re = 0, im = 0;
      is.read(reinterpret_cast<char*>(&re), 8);
      is.read(reinterpret_cast<char*>(&im), 8);
      m(i, j) = Complex(re, im);
    }
  if (!is) throw std::runtime_error("load_matrix: truncated file " + path);
  return m;
}

}  // namespace gaplab
