// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <cstring>
#include <sstream>
#include "nlevp/gallery.hpp"
#include "nlevp/solvers.hpp"
#include "test_util.hpp"

using namespace nlevp;

namespace
{

std::vector<Complex> eigenvalues(const EigenResult &r)
{
  std::vector<Complex> out;
  for (const auto &p : r.pairs)
  {
    out.push_back(p.lambda);
  }
  return out;
}

ErrorCode config_code(const SolverConfig &cfg, std::string &message)
{
  try
  {
    cfg.validate();
  }
  catch (const Error &e)
  {
    message = e.what();
    return e.code();
  }
  return ErrorCode::NotConverged;  // sentinel: no error
}

SolverConfig small_config()
{
  SolverConfig cfg;
  cfg.m = 25;
  cfg.subspace_dim = 6;
  cfg.power_steps = 4;
  cfg.k = 3;
  cfg.tol = 1e-10;
  return cfg;
}

}  // namespace

TEST_CASE("solver configuration validation")
{
  std::string msg;
  SolverConfig cfg;
  CHECK(config_code(cfg, msg) == ErrorCode::NotConverged);

  cfg.k = 21;
  CHECK(config_code(cfg, msg) == ErrorCode::ConfigError);
  CHECK(msg.find("solver.k") != std::string::npos);
  CHECK(msg.find("solver.nu") != std::string::npos);

  cfg = SolverConfig{};
  cfg.m = 1;
  CHECK(config_code(cfg, msg) == ErrorCode::ConfigError);
  cfg = SolverConfig{};
  cfg.tol = 0.0;
  CHECK(config_code(cfg, msg) == ErrorCode::ConfigError);
  cfg = SolverConfig{};
  cfg.power_steps = 0;
  CHECK(config_code(cfg, msg) == ErrorCode::ConfigError);
  cfg = SolverConfig{};
  cfg.krylov_max = 5;
  CHECK(config_code(cfg, msg) == ErrorCode::ConfigError);
  cfg = SolverConfig{};
  cfg.shift = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK(config_code(cfg, msg) == ErrorCode::ConfigError);
}

TEST_CASE("residual")
{
  const auto g = make_diagonal(std::vector<Complex>{0.5}, 2);
  Vector u = Vector::Zero(2);
  u(0) = 3.0;
  CHECK(residual(g.problem, 0.5, u) == doctest::Approx(0.0));
  CHECK(residual(g.problem, 0.0, u) == doctest::Approx(0.5));
  CHECK_THROWS_AS(residual(g.problem, 0.0, Vector(Vector::Zero(2))), Error);
}

TEST_CASE("Arnoldi finds the largest eigenvalues of a known operator")
{
  // H = V D V^{-1} with |d| spread out, so lambda = 1/d.
  std::mt19937_64 rng(41);
  const Index n = 60;
  Vector d(n);
  for (Index i = 0; i < n; ++i)
  {
    d(i) = std::polar(std::pow(0.8, static_cast<double>(i)), 0.7 * static_cast<double>(i));
  }
  const DenseMatrix v = DenseMatrix::Identity(n, n) + 0.1 * testutil::random_matrix(n, n, rng) / std::sqrt(n);
  const DenseMatrix h = v * d.asDiagonal() * v.inverse();
  const StepOperator op = [&h](const Vector &x) { return Vector(h * x); };
  const ArnoldiResult r = arnoldi_shift_invert(op, n, 0.0, 4, 40, 1e-12, 3);
  REQUIRE(r.pairs.size() == 4);
  CHECK(r.converged >= 4);
  for (std::size_t i = 0; i < 4; ++i)
  {
    CHECK(std::abs(r.pairs[i].lambda - 1.0 / d(static_cast<Index>(i))) <=
          1e-9 * std::abs(1.0 / d(static_cast<Index>(i))));
  }
}

TEST_CASE("Arnoldi breakdown on a small invariant space returns exact pairs")
{
  DenseMatrix h = DenseMatrix::Zero(5, 5);
  h.diagonal() << 4.0, 2.0, 1.0, 0.5, 0.25;
  const StepOperator op = [&h](const Vector &x) { return Vector(h * x); };
  const ArnoldiResult r = arnoldi_shift_invert(op, 5, 1.0, 2, 40, 1e-12, 1);
  REQUIRE(r.pairs.size() == 2);
  CHECK(r.steps <= 5);
  CHECK(std::abs(r.pairs[0].lambda - 1.25) <= 1e-12);
  CHECK(std::abs(r.pairs[1].lambda - 1.5) <= 1e-12);
}

TEST_CASE("Arnoldi reports non-convergence with the partial result")
{
  std::mt19937_64 rng(42);
  const Index n = 200;
  const DenseMatrix h = testutil::random_matrix(n, n, rng);
  const StepOperator op = [&h](const Vector &x) { return Vector(h * x); };
  try
  {
    arnoldi_shift_invert(op, n, 0.0, 4, 8, 1e-14, 1);
    FAIL("expected ArnoldiNoConvergence");
  }
  catch (const ArnoldiNoConvergence &e)
  {
    CHECK(e.code() == ErrorCode::NoConvergence);
    CHECK(e.partial().steps == 8);
    CHECK(e.partial().converged < 4);
  }
}

TEST_CASE("build_subspace is orthonormal and independent of the thread count")
{
  std::mt19937_64 rng(43);
  const auto g = standard_quadratic(12, 3, 5);
  const auto approx = build_rational(g.problem, trapezoid_rule(Circle{0.0, 1.0}, 25));
  const auto f = factor_cauchy(approx.coefficients, approx.poles, 0.0);
  const Basis one = build_subspace(f, 8, 5, 77, {}, 1);
  const Basis three = build_subspace(f, 8, 5, 77, {}, 3);
  CHECK(one.size() == 8);
  CHECK(one.dimension() == 12);
  const DenseMatrix gram = one.columns.adjoint() * one.columns;
  CHECK((gram - DenseMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-12);
  REQUIRE(one.columns.size() == three.columns.size());
  CHECK(std::memcmp(one.columns.data(), three.columns.data(),
                    sizeof(Complex) * static_cast<std::size_t>(one.columns.size())) == 0);

  // Given seeds occupy the leading columns.
  const BlockVector s = refine_expand_cauchy(0.2, testutil::random_vector(12, rng), approx.poles);
  const Basis seeded = build_subspace(f, 8, 5, 77, std::span<const BlockVector>(&s, 1), 1);
  CHECK((seeded.columns.col(1) - one.columns.col(1)).norm() > 1e-6);
}

TEST_CASE("refine_expand builds the eigenvector structure")
{
  const std::vector<Complex> poles{1.0, 1.0i, -1.0, -1.0i};
  Vector u(2);
  u << 1.0, 2.0i;
  const Complex lambda(0.2, 0.1);
  const BlockVector w = refine_expand_cauchy(lambda, u, poles);
  CHECK(w.kind.block_count == 5);
  CHECK((w.u() - u).norm() == 0.0);
  for (Index i = 0; i < 4; ++i)
  {
    CHECK((w.block(i) - u / (lambda - poles[static_cast<std::size_t>(i)])).norm() <= 1e-15);
  }
  CHECK_THROWS_AS(refine_expand_cauchy(poles[1], u, poles), Error);

  const Interval iv{0.0, 2.0};
  const BlockVector c = refine_expand_chebyshev(1.5, u, iv, 4, true);
  CHECK(c.kind.tag == PencilTag::ChebyshevReduced);
  for (Index i = 0; i < 4; ++i)
  {
    CHECK((c.block(i) - testutil::chebyshev_t(static_cast<std::size_t>(i), 0.5) * u).norm() <= 1e-15);
  }
}

TEST_CASE("reduced solve with nu = n reproduces the full pencil")
{
  const auto g = standard_quadratic(6, 3, 9);
  const auto approx = build_rational(g.problem, trapezoid_rule(Circle{0.0, 1.0}, 12));
  std::mt19937_64 rng(44);
  const Basis basis = orthonormalize(testutil::random_matrix(6, 6, rng));
  const auto projected = project_coefficients(basis, approx.coefficients);
  const Complex shift(0.05, 0.02);
  const auto reduced = solve_reduced_cauchy(projected, approx.poles, shift, 3);
  const auto full = pencil_eig_dense(assemble_cauchy(approx.coefficients, approx.poles), shift, 3);
  REQUIRE(reduced.size() == full.size());
  for (std::size_t i = 0; i < full.size(); ++i)
  {
    CHECK(std::abs(reduced[i].lambda - full[i].lambda) <= 1e-9 * (1.0 + std::abs(full[i].lambda)));
    CHECK(reduced[i].y.norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("stopping functional vanishes on exact eigenpairs")
{
  const auto g = make_diagonal(std::vector<Complex>{0.1, -0.3i}, 4);
  const Approximant approx = build_rational(g.problem, trapezoid_rule(Circle{0.0, 1.0}, 10));
  DenseMatrix x = DenseMatrix::Identity(4, 2);
  const std::vector<Complex> lambdas{0.1, -0.3i};
  CHECK(stopping_functional(approx, lambdas, x) <= 1e-15);
  const std::vector<Complex> off{0.2, -0.3i};
  CHECK(stopping_functional(approx, off, x) == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("reduced iteration on a diagonal problem")
{
  const std::vector<Complex> roots{Complex(0.1, 0.0), Complex(0.0, -0.2), Complex(0.3, 0.1)};
  const auto g = make_diagonal(roots, 8);
  const EigenResult r = reduced_subspace_iteration(g.problem, small_config(), Circle{0.0, 1.0});
  CHECK(r.converged);
  CHECK(testutil::multiset_distance(eigenvalues(r), roots) <= 1e-10);
  for (const auto &p : r.pairs)
  {
    CHECK(p.residual <= 1e-10);
  }
  for (std::size_t i = 1; i < r.pairs.size(); ++i)
  {
    CHECK(std::abs(r.pairs[i - 1].lambda) <= std::abs(r.pairs[i].lambda));
  }
}

TEST_CASE("eigenvalues outside the domain are rejected")
{
  const std::vector<Complex> roots{0.1, -0.2i, 1.8, -2.5};
  const auto g = make_diagonal(roots, 8);
  SolverConfig cfg = small_config();
  cfg.k = 4;
  const EigenResult r = reduced_subspace_iteration(g.problem, cfg, Circle{0.0, 1.0});
  CHECK(testutil::multiset_distance(eigenvalues(r), {0.1, -0.2i}) <= 1e-10);
  for (const auto &p : r.rejected)
  {
    CHECK_FALSE(contains(Circle{0.0, 1.0}, p.lambda));
  }
}

TEST_CASE("reduced iteration with the Chebyshev interpolant")
{
  const std::vector<Complex> roots{0.3, 0.7, 1.6};
  const auto g = make_diagonal(roots, 6);
  SolverConfig cfg = small_config();
  cfg.method = Method::ChebyshevInterp;
  cfg.m = 8;
  const Interval iv{0.0, 2.0};
  const EigenResult r = reduced_subspace_iteration(g.problem, cfg, iv);
  CHECK(testutil::multiset_distance(eigenvalues(r), roots) <= 1e-10);
  CHECK(r.shift == Complex(1.0));

  cfg.shift = Complex(0.5);
  CHECK_THROWS_AS(reduced_subspace_iteration(g.problem, cfg, iv), Error);
  cfg.shift.reset();
  CHECK_THROWS_AS(reduced_subspace_iteration(g.problem, cfg, Circle{1.0, 1.0}), Error);
}

TEST_CASE("reduced iteration agrees with full-pencil Arnoldi")
{
  const auto g = standard_quadratic(5, 3, 21);
  REQUIRE(g.reference);
  SolverConfig cfg;
  cfg.subspace_dim = 5;
  cfg.power_steps = 6;
  cfg.k = 3;
  const Circle unit{0.0, 1.0};
  const EigenResult reduced = reduced_subspace_iteration(g.problem, cfg, unit);
  const EigenResult arnoldi = full_pencil_arnoldi(g.problem, cfg, unit);
  CHECK(reduced.converged);
  CHECK(arnoldi.converged);
  CHECK(testutil::multiset_distance(eigenvalues(reduced), eigenvalues(arnoldi)) <= 1e-8);

  std::vector<Complex> inside;
  for (const Complex z : *g.reference)
  {
    if (contains(unit, z))
    {
      inside.push_back(z);
    }
  }
  CHECK(testutil::multiset_distance(eigenvalues(reduced), inside) <= 1e-8);
  std::ostringstream trace;
  for (const double h : reduced.history)
  {
    trace << h << ' ';
  }
  MESSAGE("stopping functional history: " << trace.str());
}

TEST_CASE("reduced iteration is deterministic")
{
  const auto g = standard_quadratic(8, 3, 4);
  SolverConfig cfg = small_config();
  cfg.seed = 123;
  const EigenResult a = reduced_subspace_iteration(g.problem, cfg, Circle{0.0, 1.0});
  cfg.threads = 2;
  const EigenResult b = reduced_subspace_iteration(g.problem, cfg, Circle{0.0, 1.0});
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i)
  {
    CHECK(a.pairs[i].lambda == b.pairs[i].lambda);
  }
  CHECK(a.history == b.history);
}

TEST_CASE("unreachable tolerance raises NotConverged with the best iterate")
{
  const auto g = standard_quadratic(8, 3, 4);
  SolverConfig cfg = small_config();
  cfg.tol = 1e-30;
  cfg.max_outer = 2;
  try
  {
    reduced_subspace_iteration(g.problem, cfg, Circle{0.0, 1.0});
    FAIL("expected NotConverged");
  }
  catch (const NotConverged &e)
  {
    CHECK(e.code() == ErrorCode::NotConverged);
    CHECK_FALSE(e.result().converged);
    CHECK(e.result().outer_iterations == 2);
    CHECK(e.result().history.size() == 2);
    // Nothing meets a residual bound of sqrt(1e-30); the iterates land in rejected.
    CHECK(e.result().pairs.size() + e.result().rejected.size() >= 3);
  }
}
