// SPDX-License-Identifier: Apache-2.0

#include "nlevp/gallery.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <optional>
#include <cmath>
#include <numbers>
#include <random>
#include "nlevp/errors.hpp"

namespace nlevp
{

namespace
{

constexpr double kPi = std::numbers::pi;

void check_square(const DenseMatrix &a, Index n, const char *name)
{
  if (a.rows() != n || a.cols() != n)
  {
    throw Error(ErrorCode::DimensionMismatch, std::string(name) + " must be square and match");
  }
}

// Bounding box of a region as (lower-left, upper-right).
std::pair<Complex, Complex> bounding_box(const Contour &region)
{
  if (const auto *c = std::get_if<Circle>(&region))
  {
    const Complex d(c->radius, c->radius);
    return {c->center - d, c->center + d};
  }
  if (const auto *e = std::get_if<Ellipse>(&region))
  {
    const Complex d(e->rx, e->ry);
    return {e->center - d, e->center + d};
  }
  const auto &iv = std::get<Interval>(region);
  const double h = 0.05 * (iv.b - iv.a);
  return {Complex(iv.a, -h), Complex(iv.b, h)};
}

// Only used to rank grid points, so the squared conditioning of T^H T is harmless.
double sigma_min_estimate(const DenseMatrix &t)
{
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(t.adjoint() * t, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(eig.eigenvalues()(0), 0.0));
}

}  // namespace

double relative_sigma_min(const NlevpProblem &problem, Complex z)
{
  const DenseMatrix t = problem(z);
  const Eigen::JacobiSVD<DenseMatrix> svd(t);
  const auto &s = svd.singularValues();
  return s(s.size() - 1) / std::max(s(0), 1e-300);
}

GalleryProblem make_diagonal(std::span<const Complex> roots, Index n)
{
  if (n < static_cast<Index>(roots.size()) || n < 1)
  {
    throw Error(ErrorCode::DimensionMismatch, "n must be at least the number of roots");
  }
  std::vector<Complex> r(roots.begin(), roots.end());
  GalleryProblem g;
  g.name = "diag";
  g.problem.n = n;
  g.problem.evaluate = [r, n](Complex z) {
    DenseMatrix t = DenseMatrix::Identity(n, n);
    for (std::size_t i = 0; i < r.size(); ++i)
    {
      t(static_cast<Index>(i), static_cast<Index>(i)) = z - r[i];
    }
    return t;
  };
  g.problem.derivative = [k = static_cast<Index>(r.size()), n](Complex) {
    DenseMatrix d = DenseMatrix::Zero(n, n);
    d.topLeftCorner(k, k).setIdentity();
    return d;
  };
  g.reference = r;
  g.oracle = OracleKind::ClosedForm;
  g.provenance = "roots of the diagonal entries";
  return g;
}

GalleryProblem make_quadratic(const DenseMatrix &m2, const DenseMatrix &c1, const DenseMatrix &k0)
{
  const Index n = m2.rows();
  check_square(m2, n, "M2");
  check_square(c1, n, "C1");
  check_square(k0, n, "K0");
  LUFactors lu;
  try
  {
    lu = lu_factor(m2);
  }
  catch (const Error &e)
  {
    if (e.code() != ErrorCode::SingularMatrix)
    {
      throw;
    }
    throw Error(ErrorCode::SingularLeading, "leading coefficient M2 is singular");
  }

  // [0 I; -M2^{-1} K0  -M2^{-1} C1]
  DenseMatrix companion = DenseMatrix::Zero(2 * n, 2 * n);
  companion.topRightCorner(n, n).setIdentity();
  companion.bottomLeftCorner(n, n) = -lu_solve(lu, k0);
  companion.bottomRightCorner(n, n) = -lu_solve(lu, c1);

  GalleryProblem g;
  g.name = "quadratic";
  g.problem.n = n;
  g.problem.evaluate = [m2, c1, k0](Complex z) -> DenseMatrix { return z * z * m2 + z * c1 + k0; };
  g.problem.derivative = [m2, c1](Complex z) -> DenseMatrix { return 2.0 * z * m2 + c1; };
  g.reference = dense_eig(companion).values;
  g.oracle = OracleKind::CompanionEig;
  g.provenance = "eigenvalues of the first companion linearization";
  return g;
}

GalleryProblem make_delay(const DenseMatrix &a0, const DenseMatrix &a1, double tau,
                          std::optional<Contour> region)
{
  const Index n = a0.rows();
  check_square(a0, n, "A0");
  check_square(a1, n, "A1");
  if (!(tau > 0.0))
  {
    throw Error(ErrorCode::ConfigError, "delay tau must be positive");
  }
  GalleryProblem g;
  g.name = "delay";
  g.problem.n = n;
  g.problem.evaluate = [a0, a1, tau](Complex z) -> DenseMatrix {
    DenseMatrix t = a0 + std::exp(-tau * z) * a1;
    t.diagonal().array() -= z;
    return t;
  };
  g.problem.derivative = [a1, tau, n](Complex z) -> DenseMatrix {
    return -tau * std::exp(-tau * z) * a1 - DenseMatrix::Identity(n, n);
  };
  g.oracle = OracleKind::NewtonTrace;
  g.domain = region;
  if (region)
  {
    g.reference = newton_trace_oracle(g.problem, *region).roots;
    g.provenance = "Newton-trace refinement of sigma_min grid minima";
  }
  return g;
}

OracleResult newton_trace_oracle(const NlevpProblem &problem, const Contour &region,
                                 std::size_t grid)
{
  validate(region);
  if (grid < 2)
  {
    throw Error(ErrorCode::ConfigError, "oracle grid density must be >= 2");
  }
  const auto [lo, hi] = bounding_box(region);
  const auto g = static_cast<Index>(grid);
  Eigen::MatrixXd smin(g, g);
  auto point = [&](Index i, Index j) {
    return Complex(lo.real() + (hi.real() - lo.real()) * static_cast<double>(i) /
                                   static_cast<double>(g - 1),
                   lo.imag() + (hi.imag() - lo.imag()) * static_cast<double>(j) /
                                   static_cast<double>(g - 1));
  };
  for (Index i = 0; i < g; ++i)
  {
    for (Index j = 0; j < g; ++j)
    {
      smin(i, j) = sigma_min_estimate(problem(point(i, j)));
    }
  }

  std::vector<Complex> seeds;
  for (Index i = 0; i < g; ++i)
  {
    for (Index j = 0; j < g; ++j)
    {
      bool minimum = true;
      bool strict = false;
      for (Index di = -1; di <= 1 && minimum; ++di)
      {
        for (Index dj = -1; dj <= 1; ++dj)
        {
          const Index a = i + di;
          const Index b = j + dj;
          if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= g || b >= g)
          {
            continue;
          }
          if (smin(a, b) < smin(i, j))
          {
            minimum = false;
            break;
          }
          strict = strict || smin(a, b) > smin(i, j);
        }
      }
      if (minimum && strict)
      {
        seeds.push_back(point(i, j));
      }
    }
  }

  // Newton on det T with the already found roots divided out:
  // z <- z - 1/(trace(T^{-1} T') - sum_r 1/(z - r)).
  const double scale = std::abs(hi - lo);
  auto newton = [&](Complex z, const std::vector<Complex> &deflate) -> std::optional<Complex> {
    const Complex start = z;
    for (int it = 0; it < 200; ++it)
    {
      const DenseMatrix t = problem(z);
      const Eigen::PartialPivLU<DenseMatrix> lu(t);
      Complex trace = lu.solve(problem.derivative_at(z)).trace();
      if (!std::isfinite(trace.real()) || !std::isfinite(trace.imag()) || trace == 0.0)
      {
        // T(z) is exactly singular: z is a root.
        return std::isfinite(z.real()) && std::isfinite(z.imag()) ? std::optional(z) : std::nullopt;
      }
      for (const Complex r : deflate)
      {
        trace -= 1.0 / (z - r);
      }
      const Complex step = 1.0 / trace;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z - start) > 10 * scale)
      {
        return std::nullopt;
      }
      if (std::abs(step) <= 1e-12 * (1.0 + std::abs(z)))
      {
        return z;
      }
    }
    return std::nullopt;
  };
  auto known = [](const std::vector<Complex> &roots, Complex z) {
    return std::any_of(roots.begin(), roots.end(), [&](Complex r) {
      return std::abs(r - z) <= 1e-8 * (1.0 + std::abs(z));
    });
  };

  OracleResult out;
  std::vector<Complex> found;  // every converged root, inside the region or not
  for (std::size_t s = 0; s < seeds.size(); ++s)
  {
    const auto z = newton(seeds[s], {});
    if (!z)
    {
      out.warnings.push_back(std::string(to_string(ErrorCode::OracleNoConvergence)) + "(" +
                             std::to_string(s) + "): Newton seed dropped");
      continue;
    }
    if (!known(found, *z))
    {
      found.push_back(*z);
    }
  }
  // Close roots can share one basin of sigma_min; rerun the seeds with the found roots
  // deflated until nothing new turns up.
  for (int sweep = 0; sweep < 4; ++sweep)
  {
    bool added = false;
    for (const Complex seed : seeds)
    {
      const auto z = newton(seed, found);
      if (z && !known(found, *z))
      {
        found.push_back(*z);
        added = true;
      }
    }
    if (!added)
    {
      break;
    }
  }
  for (const Complex z : found)
  {
    if (contains(region, z))
    {
      out.roots.push_back(z);
    }
  }
  std::sort(out.roots.begin(), out.roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

namespace
{

// Similarity with a well-conditioned basis: V D V^{-1}, V = I + 0.3 G/sqrt(n).
DenseMatrix with_spectrum(const std::vector<Complex> &d, std::mt19937_64 &rng)
{
  const auto n = static_cast<Index>(d.size());
  DenseMatrix v = DenseMatrix::Identity(n, n) +
                  (0.3 / std::sqrt(static_cast<double>(n))) * random_complex_matrix(n, n, rng);
  DenseMatrix diag = DenseMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
  {
    diag(i, i) = d[static_cast<std::size_t>(i)];
  }
  return v * diag * v.inverse();
}

void check_counts(Index n, Index inside)
{
  if (n < 1 || inside < 0 || inside > n)
  {
    throw Error(ErrorCode::ConfigError, "need 0 <= inside <= n and n >= 1");
  }
}

}  // namespace

GalleryProblem standard_quadratic(Index n, Index inside, std::uint64_t seed)
{
  check_counts(n, inside);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Complex> da(static_cast<std::size_t>(n));
  std::vector<Complex> db(static_cast<std::size_t>(n));
  // (zI - A)(zI - B): A carries `inside` small eigenvalues, everything else is large.
  for (Index i = 0; i < n; ++i)
  {
    const double angle = 2.0 * kPi * unit(rng);
    const double radius = i < inside ? 0.15 + 0.2 * unit(rng) : 2.5 + 2.0 * unit(rng);
    da[static_cast<std::size_t>(i)] = std::polar(radius, angle);
    db[static_cast<std::size_t>(i)] = std::polar(2.5 + 2.0 * unit(rng), 2.0 * kPi * unit(rng));
  }
  const DenseMatrix a = with_spectrum(da, rng);
  const DenseMatrix b = with_spectrum(db, rng);
  GalleryProblem g = make_quadratic(DenseMatrix::Identity(n, n), -(a + b), a * b);
  g.domain = Circle{0.0, 1.0};
  return g;
}

GalleryProblem standard_delay(Index n, Index inside, std::uint64_t seed, bool with_reference)
{
  check_counts(n, inside);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Complex> d(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
  {
    if (i < inside)
    {
      const double angle = 2.0 * kPi * (static_cast<double>(i) + 0.3 * unit(rng)) /
                           static_cast<double>(inside);
      d[static_cast<std::size_t>(i)] = std::polar(0.2 + 0.2 * unit(rng), angle);
    }
    else
    {
      d[static_cast<std::size_t>(i)] =
          std::polar(3.0 + 3.0 * unit(rng), (unit(rng) - 0.5) * 2.0 * kPi / 3.0);
    }
  }
  const DenseMatrix a0 = with_spectrum(d, rng);
  const DenseMatrix a1 = (0.05 / std::sqrt(static_cast<double>(n))) * random_complex_matrix(n, n, rng);
  if (with_reference)
  {
    return make_delay(a0, a1, 1.0, Circle{0.0, 1.5});
  }
  GalleryProblem g = make_delay(a0, a1, 1.0);
  g.domain = Circle{0.0, 1.5};
  return g;
}

}  // namespace nlevp
