// SPDX-License-Identifier: Apache-2.0

#include "nlevp/solvers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace nlevp
{

namespace
{

constexpr Index kMaxDenseReduced = 2000;

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void SolverConfig::validate() const
{
  if (m < 2)
  {
    throw Error(ErrorCode::ConfigError, "solver.m must be >= 2");
  }
  if (power_steps < 1)
  {
    throw Error(ErrorCode::ConfigError, "solver.q must be >= 1");
  }
  if (subspace_dim < 1)
  {
    throw Error(ErrorCode::ConfigError, "solver.nu must be >= 1");
  }
  if (k < 1)
  {
    throw Error(ErrorCode::ConfigError, "solver.k must be >= 1");
  }
  if (k > subspace_dim)
  {
    throw Error(ErrorCode::ConfigError, "solver.k must not exceed solver.nu");
  }
  if (!(tol > 0.0) || !std::isfinite(tol))
  {
    throw Error(ErrorCode::ConfigError, "solver.tol must be positive");
  }
  if (max_outer < 1)
  {
    throw Error(ErrorCode::ConfigError, "solver.max_outer must be >= 1");
  }
  if (krylov_max != 0 && krylov_max < 2 * k)
  {
    throw Error(ErrorCode::ConfigError, "solver.krylov_max must be >= 2k");
  }
  if (shift && !(std::isfinite(shift->real()) && std::isfinite(shift->imag())))
  {
    throw Error(ErrorCode::ConfigError, "solver.shift must be finite");
  }
}

NotConverged::NotConverged(EigenResult best)
  : Error(ErrorCode::NotConverged,
          "stopping criterion not met after " + std::to_string(best.outer_iterations) +
              " outer iterations"),
    result_(std::move(best))
{
}

ArnoldiNoConvergence::ArnoldiNoConvergence(ArnoldiResult partial)
  : Error(ErrorCode::NoConvergence, "Arnoldi did not converge all requested Ritz values",
          partial.converged),
    partial_(std::move(partial))
{
}

double residual(const NlevpProblem &problem, Complex lambda, const Vector &u)
{
  const double norm = u.norm();
  if (norm == 0.0)
  {
    throw Error(ErrorCode::ZeroVector, "residual of a zero vector");
  }
  return (problem(lambda) * u).norm() / norm;
}

ArnoldiResult arnoldi_shift_invert(const StepOperator &op, Index dim, Complex shift,
                                   std::size_t k, std::size_t krylov_max, double tol,
                                   std::uint64_t seed)
{
  if (dim < 1 || k < 1)
  {
    throw Error(ErrorCode::DimensionMismatch, "Arnoldi needs dim >= 1 and k >= 1");
  }
  if (krylov_max < 2 * k && static_cast<Index>(krylov_max) < dim)
  {
    throw Error(ErrorCode::DimensionMismatch, "krylov_max must be >= 2k");
  }
  const auto steps = std::min<Index>(static_cast<Index>(krylov_max), dim);

  DenseMatrix v = DenseMatrix::Zero(dim, steps + 1);
  DenseMatrix h = DenseMatrix::Zero(steps + 1, steps);
  std::mt19937_64 rng(seed);
  Vector start = random_complex_vector(dim, rng);
  v.col(0) = start / start.norm();

  ArnoldiResult result;
  for (Index j = 0; j < steps; ++j)
  {
    Vector w = op(v.col(j));
    for (int pass = 0; pass < 2; ++pass)
    {
      for (Index i = 0; i <= j; ++i)
      {
        const Complex c = v.col(i).dot(w);
        h(i, j) += c;
        w -= c * v.col(i);
      }
    }
    const double beta = w.norm();
    h(j + 1, j) = beta;
    const double hnorm = h.topLeftCorner(j + 2, j + 1).norm();
    const bool breakdown = beta <= 1e-14 * std::max(hnorm, 1e-300);
    if (!breakdown)
    {
      v.col(j + 1) = w / beta;
    }

    const Index size = j + 1;
    if (static_cast<std::size_t>(size) < k && !breakdown && size < steps)
    {
      continue;
    }
    const DenseMatrix hj = h.topLeftCorner(size, size);
    const DenseEigenSolver solver(hj);
    const auto &mu = solver.eigenvalues();
    const double threshold = 1e-12 * std::max(solver.norm(), 1e-300);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < mu.size(); ++i)
    {
      if (std::abs(mu[i]) > threshold)
      {
        order.push_back(i);
      }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(mu[a]) > std::abs(mu[b]);
    });
    order.resize(std::min(order.size(), k));

    std::size_t converged = 0;
    std::vector<PencilEigenpair> pairs;
    for (const std::size_t i : order)
    {
      Vector y = solver.eigenvector(i);
      y /= y.norm();
      const double estimate = breakdown ? 0.0 : beta * std::abs(y(size - 1));
      if (estimate <= tol * std::abs(mu[i]))
      {
        ++converged;
      }
      Vector x = v.leftCols(size) * y;
      x /= x.norm();
      pairs.push_back({shift + 1.0 / mu[i], std::move(x)});
    }
    result.pairs = std::move(pairs);
    result.converged = converged;
    result.steps = static_cast<std::size_t>(size);
    if (converged >= k)
    {
      return result;
    }
    if (breakdown)
    {
      // The Krylov space is invariant, so every Ritz pair is exact; fewer than k exist.
      result.converged = result.pairs.size();
      return result;
    }
  }
  throw ArnoldiNoConvergence(std::move(result));
}

Basis build_subspace(const StructuredFactorization &factorization, std::size_t nu, std::size_t q,
                     std::uint64_t seed, std::span<const BlockVector> seeds, std::size_t threads)
{
  if (nu < 1 || q < 1)
  {
    throw Error(ErrorCode::DimensionMismatch, "build_subspace needs nu >= 1 and q >= 1");
  }
  const PencilKind &kind = factorization.kind();
  const Index n = kind.block_size;

  // Start vectors are drawn serially so the basis does not depend on the thread count.
  std::vector<BlockVector> starts;
  starts.reserve(nu);
  std::mt19937_64 rng(seed);
  for (std::size_t j = 0; j < nu; ++j)
  {
    if (j < seeds.size())
    {
      if (!(seeds[j].kind == kind))
      {
        throw Error(ErrorCode::DimensionMismatch, "seed layout does not match factorization", j);
      }
      starts.push_back(seeds[j]);
    }
    else
    {
      starts.emplace_back(kind, random_complex_vector(kind.dimension(), rng));
    }
  }

  DenseMatrix columns(n, static_cast<Index>(nu));
  auto run_column = [&](std::size_t j) {
    BlockVector w = std::move(starts[j]);
    const double norm0 = w.data.norm();
    if (norm0 > 0.0)
    {
      w.data /= norm0;
    }
    for (std::size_t step = 0; step < q; ++step)
    {
      w = structured_step(factorization, w);
      const double norm = w.data.norm();
      if (norm > 0.0 && std::isfinite(norm))
      {
        w.data /= norm;
      }
    }
    columns.col(static_cast<Index>(j)) = w.u();
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, nu);
  if (workers == 1)
  {
    for (std::size_t j = 0; j < nu; ++j)
    {
      run_column(j);
    }
  }
  else
  {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t)
    {
      pool.emplace_back([&, t] {
        try
        {
          for (std::size_t j = next++; j < nu; j = next++)
          {
            run_column(j);
          }
        }
        catch (...)
        {
          failures[t] = std::current_exception();
        }
      });
    }
    for (auto &thread : pool)
    {
      thread.join();
    }
    for (const auto &failure : failures)
    {
      if (failure)
      {
        std::rethrow_exception(failure);
      }
    }
  }
  return orthonormalize(columns);
}

std::vector<DenseMatrix> project_coefficients(const Basis &basis,
                                              std::span<const DenseMatrix> coefficients)
{
  const DenseMatrix &u = basis.columns;
  std::vector<DenseMatrix> out;
  out.reserve(coefficients.size());
  for (std::size_t i = 0; i < coefficients.size(); ++i)
  {
    if (coefficients[i].rows() != u.rows() || coefficients[i].cols() != u.rows())
    {
      throw Error(ErrorCode::DimensionMismatch, "coefficient size does not match the basis", i);
    }
    out.emplace_back(u.adjoint() * (coefficients[i] * u));
  }
  return out;
}

namespace
{

void check_reduced_size(Index dim)
{
  if (dim > kMaxDenseReduced)
  {
    throw Error(ErrorCode::DimensionMismatch,
                "reduced pencil of dimension " + std::to_string(dim) +
                    " exceeds the dense limit of " + std::to_string(kMaxDenseReduced));
  }
}

std::vector<RitzPair> ritz_from_pencil(const std::vector<PencilEigenpair> &pairs,
                                       const PencilKind &kind)
{
  std::vector<RitzPair> out;
  out.reserve(pairs.size());
  for (const auto &pair : pairs)
  {
    const BlockVector w(kind, pair.w);
    Vector y = w.u();
    const double norm = y.norm();
    if (norm == 0.0)
    {
      continue;
    }
    out.push_back({pair.lambda, y / norm});
  }
  return out;
}

}  // namespace

std::vector<RitzPair> solve_reduced_cauchy(std::span<const DenseMatrix> projected,
                                           std::span<const Complex> poles, Complex shift,
                                           std::size_t k)
{
  const Pencil pencil = assemble_reduced(projected, PencilTag::CauchyReduced, poles);
  check_reduced_size(pencil.kind.dimension());
  return ritz_from_pencil(pencil_eig_dense_available(pencil, shift, k), pencil.kind);
}

std::vector<RitzPair> solve_reduced_chebyshev(std::span<const DenseMatrix> projected,
                                              const Interval &interval, std::size_t k)
{
  const Pencil pencil = assemble_reduced(projected, PencilTag::ChebyshevReduced);
  check_reduced_size(pencil.kind.dimension());
  auto pairs = ritz_from_pencil(pencil_eig_dense_available(pencil, 0.0, k), pencil.kind);
  for (auto &pair : pairs)
  {
    pair.lambda = interval.from_scaled(pair.lambda);
  }
  return pairs;
}

BlockVector refine_expand_cauchy(Complex lambda, const Vector &u, std::span<const Complex> poles,
                                 bool reduced)
{
  BlockVector w(cauchy_kind(u.size(), poles.size(), reduced));
  for (std::size_t i = 0; i < poles.size(); ++i)
  {
    const Complex offset = lambda - poles[i];
    if (std::abs(offset) <= 1e-13 * (1.0 + std::abs(poles[i])))
    {
      throw Error(ErrorCode::PoleHit, "eigenvalue estimate coincides with a pole", i);
    }
    w.block(static_cast<Index>(i)) = u / offset;
  }
  w.u() = u;
  return w;
}

BlockVector refine_expand_chebyshev(Complex lambda, const Vector &u, const Interval &interval,
                                    Index block_count, bool reduced)
{
  if (block_count < 2)
  {
    throw Error(ErrorCode::OrderTooSmall, "Chebyshev layout needs at least two blocks");
  }
  // block_count = m blocks correspond to m + 1 coefficients.
  BlockVector w(chebyshev_kind(u.size(), static_cast<std::size_t>(block_count) + 1, reduced));
  std::vector<Complex> tau(static_cast<std::size_t>(block_count));
  cheb_basis_values(interval, lambda, tau);
  for (Index i = 0; i < block_count; ++i)
  {
    w.block(i) = tau[static_cast<std::size_t>(i)] * u;
  }
  return w;
}

double stopping_functional(const Approximant &approx, std::span<const Complex> lambdas,
                           const DenseMatrix &x)
{
  if (static_cast<Index>(lambdas.size()) != x.cols())
  {
    throw Error(ErrorCode::DimensionMismatch, "one Ritz value per Ritz vector required");
  }
  const auto &b = coefficients_of(approx);
  double sum = 0.0;
  std::vector<Complex> f(b.size());
  for (std::size_t j = 0; j < lambdas.size(); ++j)
  {
    if (const auto *rational = std::get_if<RationalApproximant>(&approx))
    {
      for (std::size_t i = 0; i < b.size(); ++i)
      {
        f[i] = 1.0 / (lambdas[j] - rational->poles[i]);
      }
    }
    else
    {
      cheb_basis_values(std::get<ChebyshevApproximant>(approx).interval, lambdas[j], f);
    }
    Vector r = Vector::Zero(x.rows());
    const auto xj = x.col(static_cast<Index>(j));
    for (std::size_t i = 0; i < b.size(); ++i)
    {
      r.noalias() += f[i] * (b[i] * xj);
    }
    sum += r.squaredNorm();
  }
  return std::sqrt(sum);
}

Approximant build_approximant(const NlevpProblem &problem, const SolverConfig &cfg,
                              const Contour &domain)
{
  validate(domain);
  if (cfg.method == Method::CauchyRational)
  {
    if (std::holds_alternative<Interval>(domain))
    {
      throw Error(ErrorCode::ConfigError, "the Cauchy method needs a closed contour domain");
    }
    return build_rational(problem, make_quadrature(cfg.quadrature, domain, cfg.m));
  }
  const auto *interval = std::get_if<Interval>(&domain);
  if (interval == nullptr)
  {
    throw Error(ErrorCode::ConfigError, "the Chebyshev method needs an interval domain");
  }
  return build_chebyshev(problem, *interval, cfg.m);
}

namespace
{

// Approximant together with its structured factorization at the working shift.
struct Setup
{
  Approximant approx;
  StructuredFactorization factorization;
  Complex shift;
};

Setup prepare(const NlevpProblem &problem, const SolverConfig &cfg, const Contour &domain)
{
  cfg.validate();
  if (problem.n < 1)
  {
    throw Error(ErrorCode::DimensionMismatch, "problem dimension must be positive");
  }
  Approximant approx = build_approximant(problem, cfg, domain);
  if (cfg.method == Method::ChebyshevInterp)
  {
    const Interval interval = std::get<Interval>(domain);
    if (cfg.shift && std::abs(*cfg.shift - interval.midpoint()) >
                         1e-14 * (1.0 + std::abs(interval.midpoint())))
    {
      throw Error(ErrorCode::ConfigError,
                  "the Chebyshev method shifts at the interval center; solver.shift must match");
    }
    try
    {
      auto f = factor_chebyshev(coefficients_of(approx));
      return {std::move(approx), std::move(f), interval.midpoint()};
    }
    catch (const Error &e)
    {
      if (e.code() != ErrorCode::SingularG)
      {
        throw;
      }
    }
    // The center is an eigenvalue of the interpolant; move the interval slightly.
    const double delta = 1e-8 * (interval.b - interval.a);
    const Interval moved{interval.a + delta, interval.b + delta};
    approx = build_chebyshev(problem, moved, cfg.m);
    try
    {
      auto f = factor_chebyshev(coefficients_of(approx));
      return {std::move(approx), std::move(f), moved.midpoint()};
    }
    catch (const Error &e)
    {
      if (e.code() != ErrorCode::SingularG)
      {
        throw;
      }
      throw Error(ErrorCode::SingularShift, "interval center singular after retry");
    }
  }

  const auto &rational = std::get<RationalApproximant>(approx);
  Complex shift = cfg.shift.value_or(center_of(domain));
  for (int attempt = 0; attempt < 2; ++attempt)
  {
    try
    {
      auto f = factor_cauchy(rational.coefficients, rational.poles, shift);
      return {std::move(approx), std::move(f), shift};
    }
    catch (const Error &e)
    {
      if (e.code() != ErrorCode::SingularSchur)
      {
        throw;
      }
    }
    shift += 1e-8 * scale_of(domain);
  }
  throw Error(ErrorCode::SingularShift, "shift singular after retry");
}

EigenResult finalize(const NlevpProblem &problem, const Contour &domain, double tol,
                     Complex shift, const std::vector<Complex> &lambdas, const DenseMatrix &x)
{
  EigenResult result;
  result.shift = shift;
  const double accept = std::sqrt(tol);
  for (std::size_t j = 0; j < lambdas.size(); ++j)
  {
    EigenPair pair{lambdas[j], x.col(static_cast<Index>(j)), 0.0};
    pair.residual = residual(problem, pair.lambda, pair.u);
    if (contains(domain, pair.lambda) && pair.residual <= accept)
    {
      result.pairs.push_back(std::move(pair));
    }
    else
    {
      result.rejected.push_back(std::move(pair));
    }
  }
  auto by_distance = [&](const EigenPair &a, const EigenPair &b) {
    return std::abs(a.lambda - shift) < std::abs(b.lambda - shift);
  };
  std::stable_sort(result.pairs.begin(), result.pairs.end(), by_distance);
  std::stable_sort(result.rejected.begin(), result.rejected.end(), by_distance);
  return result;
}

}  // namespace

EigenResult reduced_subspace_iteration(const NlevpProblem &problem, const SolverConfig &cfg,
                                       const Contour &domain)
{
  Setup setup = prepare(problem, cfg, domain);
  const auto &coeffs = coefficients_of(setup.approx);
  const auto *rational = std::get_if<RationalApproximant>(&setup.approx);
  const auto *chebyshev = std::get_if<ChebyshevApproximant>(&setup.approx);
  const PencilKind &kind = setup.factorization.kind();

  // A subspace wider than the problem cannot be orthonormal; use all of C^n instead.
  const std::size_t nu = std::min<std::size_t>(cfg.subspace_dim, static_cast<std::size_t>(problem.n));
  const std::size_t k = std::min(cfg.k, nu);

  std::vector<double> history;
  std::vector<BlockVector> seeds;
  std::vector<Complex> best_lambdas;
  DenseMatrix best_x;
  double best_value = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::size_t iterations = 0;

  for (std::size_t outer = 1; outer <= cfg.max_outer; ++outer)
  {
    iterations = outer;
    const Basis basis = build_subspace(setup.factorization, nu, cfg.power_steps,
                                       splitmix64(cfg.seed + outer), seeds, cfg.threads);
    const auto projected = project_coefficients(basis, coeffs);
    const auto ritz = rational ? solve_reduced_cauchy(projected, rational->poles, setup.shift, k)
                               : solve_reduced_chebyshev(projected, chebyshev->interval, k);

    std::vector<Complex> lambdas;
    DenseMatrix x(problem.n, static_cast<Index>(ritz.size()));
    for (std::size_t j = 0; j < ritz.size(); ++j)
    {
      lambdas.push_back(ritz[j].lambda);
      Vector xj = basis.columns * ritz[j].y;
      x.col(static_cast<Index>(j)) = xj / xj.norm();
    }
    const double value = stopping_functional(setup.approx, lambdas, x);
    history.push_back(value);
    if (value < best_value || best_lambdas.empty())
    {
      best_value = value;
      best_lambdas = lambdas;
      best_x = x;
    }
    if (value <= cfg.tol)
    {
      converged = true;
      best_lambdas = std::move(lambdas);
      best_x = std::move(x);
      break;
    }

    seeds.clear();
    for (std::size_t j = 0; j < ritz.size(); ++j)
    {
      const Vector xj = x.col(static_cast<Index>(j));
      try
      {
        seeds.push_back(rational ? refine_expand_cauchy(ritz[j].lambda, xj, rational->poles)
                                 : refine_expand_chebyshev(ritz[j].lambda, xj, chebyshev->interval,
                                                           kind.block_count));
      }
      catch (const Error &e)
      {
        // A Ritz value on a pole gives no usable seed; a random column replaces it.
        if (e.code() != ErrorCode::PoleHit)
        {
          throw;
        }
      }
    }
  }

  EigenResult result = finalize(problem, domain, cfg.tol, setup.shift, best_lambdas, best_x);
  result.outer_iterations = iterations;
  result.converged = converged;
  result.history = std::move(history);
  if (!converged)
  {
    throw NotConverged(std::move(result));
  }
  return result;
}

EigenResult full_pencil_arnoldi(const NlevpProblem &problem, const SolverConfig &cfg,
                                const Contour &domain)
{
  Setup setup = prepare(problem, cfg, domain);
  const StructuredFactorization &f = setup.factorization;
  const PencilKind kind = f.kind();
  const std::size_t krylov_max = cfg.krylov_max != 0 ? cfg.krylov_max
                                                     : std::max<std::size_t>(4 * cfg.k, 40);
  const StepOperator op = [&](const Vector &x) {
    return structured_step(f, BlockVector(kind, x)).data;
  };

  ArnoldiResult arnoldi;
  bool converged = true;
  try
  {
    arnoldi = arnoldi_shift_invert(op, kind.dimension(), f.shift(), cfg.k, krylov_max, cfg.tol,
                                   splitmix64(cfg.seed));
  }
  catch (const ArnoldiNoConvergence &e)
  {
    arnoldi = e.partial();
    converged = false;
  }

  const auto *chebyshev = std::get_if<ChebyshevApproximant>(&setup.approx);
  std::vector<Complex> lambdas;
  DenseMatrix x(problem.n, static_cast<Index>(arnoldi.pairs.size()));
  Index used = 0;
  for (const auto &pair : arnoldi.pairs)
  {
    const BlockVector w(kind, pair.w);
    Vector u = w.u();
    const double norm = u.norm();
    if (norm == 0.0)
    {
      continue;
    }
    lambdas.push_back(chebyshev ? chebyshev->interval.from_scaled(pair.lambda) : pair.lambda);
    x.col(used++) = u / norm;
  }
  x.conservativeResize(Eigen::NoChange, used);

  EigenResult result = finalize(problem, domain, cfg.tol, setup.shift, lambdas, x);
  result.outer_iterations = 1;
  result.converged = converged;
  result.history = {stopping_functional(setup.approx, lambdas, x)};
  if (!converged)
  {
    throw NotConverged(std::move(result));
  }
  return result;
}

}  // namespace nlevp
