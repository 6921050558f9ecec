#include "gaplab/eigensolve.hpp"

#include <Eigen/SparseLU>
#include <atomic>
#include <stdexcept>
#include <thread>
#include <vector>

namespace gaplab {

EighResult eigh(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigh: SelfAdjointEigenSolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

RealVector eigvals(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigvals: SelfAdjointEigenSolver failed");
  return es.eigenvalues();
}

EighResult lowest_eigenpairs(const SparseCMatrix& H, int nev, double shift, int iters,
                             double tol) {
  const Eigen::Index n = H.rows();
  if (nev >= n) {
    EighResult full = eigh(Matrix(H));
    full.values.conservativeResize(std::min<Eigen::Index>(nev, n));
    return full;
  }

  SparseCMatrix A = H;
  for (Eigen::Index i = 0; i < n; ++i) A.coeffRef(i, i) -= Complex(shift, 0.0);
  A.makeCompressed();
  Eigen::SparseLU<SparseCMatrix> lu(A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("lowest_eigenpairs: factorization failed (shift on an eigenvalue?)");

  const int block = std::min<Eigen::Index>(nev + std::max(2, nev / 2), n);
  // deterministic quasi-random start block
  Matrix X(n, block);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < block; ++j) {
      double t = 0.3 + 0.7 * std::sin(0.731 * static_cast<double>(i + 1) * (j + 1));
      X(i, j) = Complex(t, std::cos(1.137 * static_cast<double>(i + 2 * j + 1)));
    }

  RealVector prev = RealVector::Zero(nev);
  for (int it = 0; it < iters; ++it) {
    X = lu.solve(X);
    // ortho
    Eigen::HouseholderQR<Matrix> qr(X);
    X = qr.householderQ() * Matrix::Identity(n, block);
    // Rayleigh-Ritz on the block
    Matrix HX = H * X;
    Matrix S = X.adjoint() * HX;
    EighResult ritz = eigh(0.5 * (S + S.adjoint()));
    X = X * ritz.vectors;
    if (it >= 4) {
      RealVector cur = ritz.values.head(nev);
      if ((cur - prev).cwiseAbs().maxCoeff() < tol) {
        return {cur, (X.leftCols(nev)).eval()};
      }
      prev = cur;
    } else {
      prev = ritz.values.head(nev);
    }
  }
  Matrix HX = H * X;
  Matrix S = X.adjoint() * HX;
  EighResult ritz = eigh(0.5 * (S + S.adjoint()));
  X = X * ritz.vectors;
  return {ritz.values.head(nev), (X.leftCols(nev)).eval()};
}

void parallel_for(Eigen::Index n, int threads,
                  const std::function<void(Eigen::Index)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (Eigen::Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Eigen::Index> next{0};
  auto worker = [&]() {
    for (;;) {
      Eigen::Index i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int nw = std::min<Eigen::Index>(threads, n);
  pool.reserve(nw);
  for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace gaplab
