// SPDX-License-Identifier: Apache-2.0

#ifndef NLEVP_LINALG_HPP
#define NLEVP_LINALG_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <vector>
#include <Eigen/Dense>

//
// Dense complex kernels: LU with partial pivoting, Gram-Schmidt orthonormalization and a
// self-contained Hessenberg/QR eigensolver. Eigen is used for storage and BLAS-like
// arithmetic only; the factorizations are implemented here.
//

namespace nlevp
{

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

using namespace std::complex_literals;

// Row-wise infinity norm, max_i sum_j |a_ij|.
double norm_inf(const DenseMatrix &a);

bool all_finite(const DenseMatrix &a);

// P*A = L*U. L (unit lower) and U share the storage of lu; row i of P*A is row perm[i]
// of A.
struct LUFactors
{
  DenseMatrix lu;
  std::vector<Index> perm;

  Index size() const { return lu.rows(); }
};

// Throws SingularMatrix when a pivot magnitude falls below 1e-14 * scale, where scale is
// reference_norm if given (>= 0) and ||A||_inf otherwise.
LUFactors lu_factor(const DenseMatrix &a, double reference_norm = -1.0);

Vector lu_solve(const LUFactors &f, const Vector &b);
DenseMatrix lu_solve(const LUFactors &f, const DenseMatrix &b);

// Columns orthonormal in the Euclidean inner product.
struct Basis
{
  DenseMatrix columns;

  Index size() const { return columns.cols(); }
  Index dimension() const { return columns.rows(); }
};

// Modified Gram-Schmidt with one reorthogonalization pass. Columns that lose more than
// a factor 1e12 of their norm to the projection are replaced by deterministic
// pseudo-random unit vectors.
Basis orthonormalize(const DenseMatrix &v);

// Eigenvalues of an upper-Hessenberg matrix by single-shift complex QR with Wilkinson
// shifts. Entries below the subdiagonal are ignored. Throws NoConvergence after 30*n
// sweeps.
std::vector<Complex> hessenberg_eig(const DenseMatrix &h);

struct EigenPairs
{
  std::vector<Complex> values;
  DenseMatrix vectors;  // unit-norm columns, matching values
};

// General dense eigensolver that keeps the Hessenberg reduction around so eigenvectors
// can be recovered on demand for a subset of the spectrum.
class DenseEigenSolver
{
public:
  explicit DenseEigenSolver(const DenseMatrix &a);

  const std::vector<Complex> &eigenvalues() const { return values_; }

  // Unit-norm eigenvector for eigenvalues()[i], by inverse iteration on the Hessenberg
  // form mapped back through the Householder reflectors.
  Vector eigenvector(std::size_t i) const;

  double norm() const { return norm_; }

private:
  DenseMatrix hessenberg_;
  std::vector<Vector> reflectors_;
  std::vector<Complex> values_;
  double norm_ = 0.0;
};

EigenPairs dense_eig(const DenseMatrix &a);

// Standard complex normal entries, E|z|^2 = 1.
Vector random_complex_vector(Index n, std::mt19937_64 &rng);
DenseMatrix random_complex_matrix(Index rows, Index cols, std::mt19937_64 &rng);

}  // namespace nlevp

#endif  // NLEVP_LINALG_HPP
