#ifndef GAPLAB_FIBERS_HPP
#define GAPLAB_FIBERS_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>

#include "gaplab/flux.hpp"
#include "gaplab/potential.hpp"

namespace gaplab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseCMatrix = Eigen::SparseMatrix<Complex>;

enum class Backend { Lattice, Continuum };

// Quasimomentum reduced to the magnetic Brillouin zone
// B_(q) = (-pi, pi] x (-pi/q, pi/q].
struct Quasimomentum {
  double k1 = 0.0;
  double k2 = 0.0;
  bool reduced = false;  // set when the input had to be folded back into B_(q)
};

Quasimomentum reduce_to_zone(double k1, double k2, std::int64_t q);

// Hermitian Bloch-Floquet fiber H(k) on the magnetic unit cell
// Omega_(q) = (-1/2,1/2] x (-q/2,q/2].  Lattice: dim q.  Continuum: dim q*N^2.
struct FiberOperator {
  Backend backend = Backend::Lattice;
  RationalFlux flux;
  Quasimomentum k;
  int grid = 0;  // continuum grid resolution N; 0 for lattice
  Eigen::Index dim = 0;
  Matrix dense;          // filled for lattice fibers
  SparseCMatrix sparse;  // filled for continuum fibers

  const Matrix& matrix() const;      // dense view (converts if needed)
  Matrix take_dense() const;         // always materializes
  double hermiticity_residual() const;
};

// Harper-type fiber of the hopping Hofstadter Hamiltonian
// H(g;g') = exp(i b phi(g,g')) on nearest neighbours plus on-site V, fibered
// over the enlarged lattice Z^2_(q) = Z x qZ.  The resulting q x q matrix has
// diagonal 2 cos(k1 + b j) + V_j, unit hops along the cell and exp(-+ i q k2)
// on the periodic closure; it is exactly periodic under k -> k + (2pi, 0) and
// k -> k + (0, 2pi/q).
FiberOperator lattice_fiber(const RationalFlux& flux, double k1, double k2,
                            const PotentialSpec& V = {});

// Five-point finite-difference fiber of (P - bA)^2 + V on Omega_(q) with an
// N x (qN) grid, exact Peierls link phases in the symmetric gauge, and the
// magnetic quasi-periodic boundary twists of the Bloch-Floquet transform.
FiberOperator continuum_fiber(const RationalFlux& flux, double k1, double k2,
                              const PotentialSpec& V, int N);

// Documented binary dump: uint64 rows, uint64 cols, then row-major
// (re, im) doubles, all little-endian.
void dump_matrix(const Matrix& m, const std::string& path);
Matrix load_matrix(const std::string& path);

}  // namespace gaplab

#endif
