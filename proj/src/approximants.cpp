// SPDX-License-Identifier: Apache-2.0

#include "nlevp/approximants.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include "nlevp/errors.hpp"

namespace nlevp
{

DenseMatrix NlevpProblem::derivative_at(Complex z) const
{
  if (derivative)
  {
    return derivative(z);
  }
  const double h = 1e-7 * (1.0 + std::abs(z));
  return (evaluate(z + h) - evaluate(z - h)) / (2.0 * h);
}

namespace
{

DenseMatrix sample(const NlevpProblem &problem, Complex z, std::size_t index)
{
  if (problem.region && !contains(*problem.region, z))
  {
    throw Error(ErrorCode::EvaluationFailure, "sample point lies outside the analyticity region",
                index);
  }
  DenseMatrix t;
  try
  {
    t = problem.evaluate(z);
  }
  catch (const std::exception &e)
  {
    throw Error(ErrorCode::EvaluationFailure, e.what(), index);
  }
  if (t.rows() != problem.n || t.cols() != problem.n)
  {
    throw Error(ErrorCode::EvaluationFailure, "evaluator returned a matrix of the wrong size",
                index);
  }
  if (!all_finite(t))
  {
    throw Error(ErrorCode::EvaluationFailure, "evaluator returned non-finite entries", index);
  }
  return t;
}

}  // namespace

RationalApproximant build_rational(const NlevpProblem &problem, const Quadrature &quad)
{
  if (quad.nodes.size() < 3 || quad.nodes.size() != quad.weights.size())
  {
    throw Error(ErrorCode::InvalidOrder, "rational approximant needs m >= 2");
  }
  RationalApproximant approx{{}, quad.nodes, quad.contour};
  approx.coefficients.reserve(quad.nodes.size());
  for (std::size_t i = 0; i < quad.nodes.size(); ++i)
  {
    approx.coefficients.push_back(quad.weights[i] * sample(problem, quad.nodes[i], i));
  }
  return approx;
}

DenseMatrix eval_rational(const RationalApproximant &approx, Complex z)
{
  const Index n = approx.dimension();
  DenseMatrix out = DenseMatrix::Zero(n, n);
  for (std::size_t i = 0; i < approx.poles.size(); ++i)
  {
    const Complex d = z - approx.poles[i];
    if (std::abs(d) <= 1e-13 * (1.0 + std::abs(approx.poles[i])))
    {
      throw Error(ErrorCode::PoleHit, "evaluation point coincides with a pole", i);
    }
    out += approx.coefficients[i] / d;
  }
  return out;
}

ChebyshevApproximant build_chebyshev(const NlevpProblem &problem, const Interval &interval,
                                     std::size_t m)
{
  const std::vector<double> x = chebyshev_points(interval, m);
  std::vector<DenseMatrix> samples;
  samples.reserve(m + 1);
  for (std::size_t k = 0; k <= m; ++k)
  {
    samples.push_back(sample(problem, x[k], k));
  }
  const auto count = static_cast<double>(m + 1);
  ChebyshevApproximant approx{{}, interval};
  approx.coefficients.reserve(m + 1);
  for (std::size_t i = 0; i <= m; ++i)
  {
    DenseMatrix b = DenseMatrix::Zero(problem.n, problem.n);
    for (std::size_t k = 0; k <= m; ++k)
    {
      const double angle = static_cast<double>(i) * std::numbers::pi *
                           (static_cast<double>(k) + 0.5) / count;
      b += std::cos(angle) * samples[k];
    }
    b *= (i == 0 ? 1.0 : 2.0) / count;
    approx.coefficients.push_back(std::move(b));
  }
  return approx;
}

DenseMatrix eval_chebyshev(const ChebyshevApproximant &approx, Complex z)
{
  const Complex s = approx.interval.to_scaled(z);
  const Index n = approx.dimension();
  const auto &b = approx.coefficients;
  DenseMatrix next = DenseMatrix::Zero(n, n);   // b_{k+1}
  DenseMatrix next2 = DenseMatrix::Zero(n, n);  // b_{k+2}
  for (std::size_t k = b.size(); k-- > 1;)
  {
    DenseMatrix cur = b[k] + 2.0 * s * next - next2;
    next2 = std::move(next);
    next = std::move(cur);
  }
  return b[0] + s * next - next2;
}

DenseMatrix evaluate(const Approximant &approx, Complex z)
{
  if (const auto *r = std::get_if<RationalApproximant>(&approx))
  {
    return eval_rational(*r, z);
  }
  return eval_chebyshev(std::get<ChebyshevApproximant>(approx), z);
}

const std::vector<DenseMatrix> &coefficients_of(const Approximant &approx)
{
  return std::visit([](const auto &a) -> const std::vector<DenseMatrix> & { return a.coefficients; },
                    approx);
}

double sup_error(const Approximant &approx, const NlevpProblem &problem,
                 std::span<const Complex> grid)
{
  double worst = 0.0;
  for (const Complex z : grid)
  {
    const DenseMatrix diff = evaluate(approx, z) - problem.evaluate(z);
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<Complex> default_test_grid(const Contour &domain, double scale, std::size_t count)
{
  const Complex c = center_of(domain);
  double half = scale_of(domain);
  if (const auto *e = std::get_if<Ellipse>(&domain))
  {
    half = e->rx;
  }
  half *= scale;
  std::vector<Complex> grid(count);
  for (std::size_t j = 0; j < count; ++j)
  {
    const double t = count == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(j) / (count - 1.0);
    grid[j] = c + half * t;
  }
  return grid;
}

DecayReport decay_check(const NlevpProblem &problem, const Contour &domain,
                        std::span<const std::size_t> orders, std::span<const Complex> grid,
                        QuadratureRule rule)
{
  if (orders.size() < 3)
  {
    throw Error(ErrorCode::InvalidOrder, "decay_check needs at least three orders");
  }
  for (std::size_t j = 1; j < orders.size(); ++j)
  {
    if (orders[j] <= orders[j - 1])
    {
      throw Error(ErrorCode::InvalidOrder, "orders must be strictly increasing", j);
    }
  }
  double magnitude = 0.0;
  for (const Complex z : grid)
  {
    magnitude = std::max(magnitude, problem.evaluate(z).cwiseAbs().maxCoeff());
  }
  const double noise = 1e-13 * std::max(1.0, magnitude);

  DecayReport report;
  for (const std::size_t m : orders)
  {
    Approximant approx = std::holds_alternative<Interval>(domain)
                             ? Approximant(build_chebyshev(problem, std::get<Interval>(domain), m))
                             : Approximant(build_rational(problem, make_quadrature(rule, domain, m)));
    report.points.push_back({m, sup_error(approx, problem, grid)});
  }

  // Least-squares slope of log(error) against m over points above rounding level.
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  int used = 0;
  for (const DecayPoint &p : report.points)
  {
    if (p.error <= noise)
    {
      continue;
    }
    const auto x = static_cast<double>(p.m);
    const double y = std::log(p.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 2)
  {
    // Nothing left to fit once the errors reach rounding level.
    report.ratio = 0.0;
  }
  else
  {
    const double slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
    report.ratio = std::exp(slope);
  }
  report.decaying = report.ratio < 1.0;
  return report;
}

}  // namespace nlevp
