// SPDX-License-Identifier: Apache-2.0

#ifndef NLEVP_APPROXIMANTS_HPP
#define NLEVP_APPROXIMANTS_HPP

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>
#include "nlevp/contour.hpp"
#include "nlevp/linalg.hpp"

namespace nlevp
{

using MatrixFunction = std::function<DenseMatrix(Complex)>;

// T(z): an n x n analytic matrix-valued function. `region` bounds where T is analytic;
// an empty region means T is entire.
struct NlevpProblem
{
  Index n = 0;
  MatrixFunction evaluate;
  std::optional<Contour> region;
  MatrixFunction derivative;  // optional; central differences otherwise

  DenseMatrix operator()(Complex z) const { return evaluate(z); }

  // T'(z), analytic when available, else a central difference with step 1e-7*(1+|z|).
  DenseMatrix derivative_at(Complex z) const;
};

// sum_i B_i / (z - sigma_i) with B_i = w_i T(sigma_i).
struct RationalApproximant
{
  std::vector<DenseMatrix> coefficients;
  std::vector<Complex> poles;
  Contour contour;

  std::size_t order() const { return coefficients.size() - 1; }
  Index dimension() const { return coefficients.front().rows(); }
};

// sum_i B_i tau_i(z), tau_i(z) = T_i((2z - a - b)/(b - a)).
struct ChebyshevApproximant
{
  std::vector<DenseMatrix> coefficients;
  Interval interval;

  std::size_t order() const { return coefficients.size() - 1; }
  Index dimension() const { return coefficients.front().rows(); }
};

using Approximant = std::variant<RationalApproximant, ChebyshevApproximant>;

RationalApproximant build_rational(const NlevpProblem &problem, const Quadrature &quad);

// Throws PoleHit(i) when |z - sigma_i| <= 1e-13 * (1 + |sigma_i|).
DenseMatrix eval_rational(const RationalApproximant &approx, Complex z);

ChebyshevApproximant build_chebyshev(const NlevpProblem &problem, const Interval &interval,
                                     std::size_t m);

// Clenshaw recurrence; valid for complex z.
DenseMatrix eval_chebyshev(const ChebyshevApproximant &approx, Complex z);

DenseMatrix evaluate(const Approximant &approx, Complex z);

const std::vector<DenseMatrix> &coefficients_of(const Approximant &approx);

// max over the grid of the entrywise max norm of T~(z) - T(z).
double sup_error(const Approximant &approx, const NlevpProblem &problem,
                 std::span<const Complex> grid);

// 101 equispaced points on the real diameter of the domain, shrunk about the center by
// `scale`: [c - scale*r, c + scale*r] for curves, the scaled interval otherwise.
std::vector<Complex> default_test_grid(const Contour &domain, double scale = 1.0,
                                       std::size_t count = 101);

struct DecayPoint
{
  std::size_t m = 0;
  double error = 0.0;
};

struct DecayReport
{
  std::vector<DecayPoint> points;
  double ratio = 0.0;  // exp of the fitted slope of log(error) against m
  bool decaying = false;
};

// Builds an approximant of each order (rational for curves, Chebyshev for intervals) and
// fits a geometric rate to the errors. Errors already at rounding level are left out of
// the fit; when every error is at rounding level the ratio is reported as 0.
DecayReport decay_check(const NlevpProblem &problem, const Contour &domain,
                        std::span<const std::size_t> orders, std::span<const Complex> grid,
                        QuadratureRule rule = QuadratureRule::Trapezoid);

}  // namespace nlevp

#endif  // NLEVP_APPROXIMANTS_HPP
