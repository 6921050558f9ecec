#ifndef GAPLAB_EIGENSOLVE_HPP
#define GAPLAB_EIGENSOLVE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>

#include "gaplab/fibers.hpp"

namespace gaplab {

struct EighResult {
  RealVector values;
  Matrix vectors;
};

// dense Hermitian eigensolve, ascending eigenvalues
EighResult eigh(const Matrix& m);
RealVector eigvals(const Matrix& m);

// Lowest nev eigenpairs of a sparse Hermitian operator by shift-invert block
// iteration: factorize (H - shift I) once, iterate the inverse on a block,
// Rayleigh-Ritz in the block.  `shift` must lie below the spectrum's region
// of interest and away from eigenvalues.
EighResult lowest_eigenpairs(const SparseCMatrix& H, int nev, double shift,
                             int iters = 60, double tol = 1e-11);

// index-ordered parallel map over [0, n)
void parallel_for(Eigen::Index n, int threads, const std::function<void(Eigen::Index)>& fn);

}  // namespace gaplab

#endif
