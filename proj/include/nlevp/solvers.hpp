// SPDX-License-Identifier: Apache-2.0

#ifndef NLEVP_SOLVERS_HPP
#define NLEVP_SOLVERS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>
#include "nlevp/approximants.hpp"
#include "nlevp/contour.hpp"
#include "nlevp/errors.hpp"
#include "nlevp/linearization.hpp"
#include "nlevp/structured.hpp"

namespace nlevp
{

enum class Method
{
  CauchyRational,
  ChebyshevInterp
};

struct SolverConfig
{
  Method method = Method::CauchyRational;
  QuadratureRule quadrature = QuadratureRule::Trapezoid;
  std::size_t m = 25;              // approximation order
  std::size_t subspace_dim = 20;   // nu
  std::size_t power_steps = 10;    // q, inverse-power steps per column
  std::size_t k = 6;               // requested eigenvalues, k <= nu
  double tol = 1e-12;              // outer stopping tolerance
  std::size_t max_outer = 25;
  std::optional<Complex> shift;    // defaults to the domain center
  std::uint64_t seed = 1;
  std::size_t krylov_max = 0;      // 0 selects max(4k, 40)
  std::size_t threads = 1;

  // Throws ConfigError naming the violated constraint.
  void validate() const;

  bool operator==(const SolverConfig &) const = default;
};

struct EigenPair
{
  Complex lambda;
  Vector u;
  double residual = 0.0;  // ||T(lambda) u|| / ||u|| against the original T
};

struct EigenResult
{
  std::vector<EigenPair> pairs;     // accepted, sorted by |lambda - shift|
  std::vector<EigenPair> rejected;  // outside the domain or residual above sqrt(tol)
  std::size_t outer_iterations = 0;
  bool converged = false;
  std::vector<double> history;      // stopping functional per outer iteration
  Complex shift = 0.0;
};

// Raised by the drivers when the stopping criterion is not met; carries the best result.
class NotConverged : public Error
{
public:
  explicit NotConverged(EigenResult best);
  const EigenResult &result() const noexcept { return result_; }

private:
  EigenResult result_;
};

// ||T(lambda) u||_2 / ||u||_2. Throws ZeroVector.
double residual(const NlevpProblem &problem, Complex lambda, const Vector &u);

// Applies H = (A - shift M)^{-1} M.
using StepOperator = std::function<Vector(const Vector &)>;

struct ArnoldiResult
{
  std::vector<PencilEigenpair> pairs;  // lambda = shift + 1/mu, largest |mu| first
  std::size_t converged = 0;
  std::size_t steps = 0;
};

class ArnoldiNoConvergence : public Error
{
public:
  explicit ArnoldiNoConvergence(ArnoldiResult partial);
  const ArnoldiResult &partial() const noexcept { return partial_; }

private:
  ArnoldiResult partial_;
};

// Arnoldi (modified Gram-Schmidt, one reorthogonalization, no restarts) on H. A Ritz value
// mu is converged when |h_{j+1,j}| |e_j^T y| <= tol |mu|.
ArnoldiResult arnoldi_shift_invert(const StepOperator &op, Index dim, Complex shift,
                                   std::size_t k, std::size_t krylov_max, double tol,
                                   std::uint64_t seed);

// nu columns from q structured inverse-power steps each, keeping only the u part, then
// orthonormalized. The first seeds.size() columns start from the given iterates, the
// rest from complex normal vectors drawn from `seed`.
Basis build_subspace(const StructuredFactorization &factorization, std::size_t nu,
                     std::size_t q, std::uint64_t seed, std::span<const BlockVector> seeds = {},
                     std::size_t threads = 1);

// U^H B_i U.
std::vector<DenseMatrix> project_coefficients(const Basis &basis,
                                              std::span<const DenseMatrix> coefficients);

struct RitzPair
{
  Complex lambda;
  Vector y;  // unit norm
};

// Dense solve of the reduced pencil; returns up to k pairs nearest the shift.
std::vector<RitzPair> solve_reduced_cauchy(std::span<const DenseMatrix> projected,
                                           std::span<const Complex> poles, Complex shift,
                                           std::size_t k);

// Shift at the interval center; eigenvalues mapped back from the scaled variable.
std::vector<RitzPair> solve_reduced_chebyshev(std::span<const DenseMatrix> projected,
                                              const Interval &interval, std::size_t k);

// Cauchy: v_i = u/(lambda - sigma_i), last block u. Throws PoleHit.
BlockVector refine_expand_cauchy(Complex lambda, const Vector &u, std::span<const Complex> poles,
                                 bool reduced = false);

// Chebyshev: v_i = tau_i(lambda) u for i = 0..block_count-1.
BlockVector refine_expand_chebyshev(Complex lambda, const Vector &u, const Interval &interval,
                                    Index block_count, bool reduced = false);

// || [T~(lambda_j) x_j]_j ||_F for unit-norm columns x_j.
double stopping_functional(const Approximant &approx, std::span<const Complex> lambdas,
                           const DenseMatrix &x);

// Rational approximant for curves, Chebyshev interpolant for intervals, per cfg.method.
Approximant build_approximant(const NlevpProblem &problem, const SolverConfig &cfg,
                              const Contour &domain);

// Reduced subspace iteration: inverse-power subspace, Rayleigh-Ritz projection, dense
// reduced solve, repeated from refined Ritz vectors until the stopping functional drops
// to cfg.tol. Throws NotConverged with the best iterate otherwise.
EigenResult reduced_subspace_iteration(const NlevpProblem &problem, const SolverConfig &cfg,
                                       const Contour &domain);

// Shift-and-invert Arnoldi on the full structured pencil.
EigenResult full_pencil_arnoldi(const NlevpProblem &problem, const SolverConfig &cfg,
                                const Contour &domain);

}  // namespace nlevp

#endif  // NLEVP_SOLVERS_HPP
