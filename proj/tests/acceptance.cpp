// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion, nonzero exit status if any fails.
// Usage: acceptance [path-to-nlevp-cli]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>
#include "nlevp/gallery.hpp"
#include "nlevp/solvers.hpp"
#include "test_util.hpp"

using namespace nlevp;

namespace
{

// Pinned thresholds.
constexpr double kDecayRatioMax = 0.6;
constexpr double kStepRelTol = 1e-11;
constexpr double kScalarRootTol = 1e-9;
constexpr double kSpectralTol = 1e-6;
constexpr double kResidualTol = 1e-8;
constexpr std::size_t kMaxOuter = 25;
constexpr double kArnoldiFactor = 10.0;
constexpr double kCollapseTol = 1e-9;
constexpr double kNodeRelTol = 1e-10;
constexpr double kRecurrenceTol = 1e-13;

// Wall-clock budgets in seconds.
constexpr double kBudget[] = {1.0, 10.0, 10.0, 30.0, 60.0, 5.0, 1.0, 60.0};

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *format, double x)
{
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, format, x);
  return buffer;
}

NlevpProblem scalar(std::function<Complex(Complex)> f)
{
  NlevpProblem p;
  p.n = 1;
  p.evaluate = [f = std::move(f)](Complex z) { return DenseMatrix::Constant(1, 1, f(z)); };
  return p;
}

std::vector<Complex> lambdas(const std::vector<PencilEigenpair> &pairs)
{
  std::vector<Complex> out;
  for (const auto &p : pairs)
  {
    out.push_back(p.lambda);
  }
  return out;
}

// Scalar-root oracles scan a bounded region; both sets are compared inside it.
constexpr double kScanRadius = 4.0;

// Two-sided nearest distance relative to max(1, |z|) between the members of each set inside
// the scan disk and the whole other set. Infinity when one side has a member without partner.
double relative_match(const std::vector<Complex> &found, const std::vector<Complex> &oracle,
                      std::size_t &compared)
{
  double worst = 0.0;
  compared += static_cast<std::size_t>(
      std::count_if(oracle.begin(), oracle.end(), [](Complex z) { return std::abs(z) <= kScanRadius; }));
  const auto one_side = [&](const std::vector<Complex> &from, const std::vector<Complex> &to) {
    for (const Complex z : from)
    {
      if (std::abs(z) <= kScanRadius)
      {
        worst = std::max(worst, testutil::nearest(to, z) / std::max(1.0, std::abs(z)));
      }
    }
  };
  one_side(found, oracle);
  one_side(oracle, found);
  return worst;
}

// 1. Geometric decay of the trapezoid approximant of 1/(z - 2) on |z| <= 1/2.
Outcome decay_rate()
{
  const auto t = scalar([](Complex z) { return 1.0 / (z - 2.0); });
  const Circle unit{0.0, 1.0};
  std::vector<Complex> grid;
  for (int j = 0; j < 64; ++j)
  {
    grid.push_back(std::polar(0.5, 2.0 * std::numbers::pi * j / 64.0));
  }
  for (int j = 0; j <= 32; ++j)
  {
    grid.emplace_back(-0.5 + j / 32.0, 0.0);
  }
  std::vector<std::size_t> orders;
  for (std::size_t m = 8; m <= 48; m += 4)
  {
    orders.push_back(m);
  }
  const DecayReport r = decay_check(t, unit, orders, grid);
  Outcome o;
  o.pass = r.decaying && r.ratio <= kDecayRatioMax;
  o.detail = "ratio " + fmt("%.4f", r.ratio) + " (max " + fmt("%.2f", kDecayRatioMax) + "), error(m=8) " +
             fmt("%.2e", r.points.front().error) + ", error(m=48) " + fmt("%.2e", r.points.back().error);
  return o;
}

// 2. Structured inverse-power steps against a dense solve of the assembled pencil.
Outcome structured_steps()
{
  std::mt19937_64 rng(20240901);
  std::uniform_int_distribution<int> size(1, 8);
  std::uniform_int_distribution<int> order(2, 12);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  int vectors = 0;
  for (const PencilTag tag : {PencilTag::CauchyFull, PencilTag::ChebyshevFull, PencilTag::CauchyReduced,
                              PencilTag::ChebyshevReduced})
  {
    const bool cauchy = tag == PencilTag::CauchyFull || tag == PencilTag::CauchyReduced;
    const bool reduced = tag == PencilTag::CauchyReduced || tag == PencilTag::ChebyshevReduced;
    for (int instance = 0; instance < 25; ++instance)
    {
      const Index n = size(rng);
      const auto m = static_cast<std::size_t>(order(rng));
      std::vector<DenseMatrix> b;
      for (std::size_t i = 0; i <= m; ++i)
      {
        b.push_back(testutil::random_matrix(n, n, rng));
      }
      std::vector<Complex> poles;
      Complex shift = 0.0;
      std::optional<StructuredFactorization> f;
      Pencil p;
      if (cauchy)
      {
        const double radius = 1.0 + 0.5 * (unit(rng) + 1.0);
        for (std::size_t i = 0; i <= m; ++i)
        {
          poles.push_back(std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(i) /
                                                 static_cast<double>(m + 1)));
        }
        shift = Complex(0.3 * unit(rng), 0.3 * unit(rng));
        f = factor_cauchy(b, poles, shift, reduced);
        p = reduced ? assemble_reduced(b, tag, poles) : assemble_cauchy(b, poles);
      }
      else
      {
        f = factor_chebyshev(b, reduced);
        p = reduced ? assemble_reduced(b, tag) : assemble_chebyshev(b);
      }
      const Eigen::PartialPivLU<DenseMatrix> lu(p.a - shift * p.m);
      for (int v = 0; v < 4; ++v)
      {
        const BlockVector w(f->kind(), testutil::random_vector(f->kind().dimension(), rng));
        const Vector dense = lu.solve(p.m * w.data);
        const Vector fast = structured_step(*f, w).data;
        worst = std::max(worst, (fast - dense).norm() / dense.norm());
        ++vectors;
      }
    }
  }
  Outcome o;
  o.pass = worst <= kStepRelTol;
  o.detail = std::to_string(vectors) + " vectors over 4 layouts, worst relative error " +
             fmt("%.2e", worst) + " (max " + fmt("%.0e", kStepRelTol) + ")";
  return o;
}

// 3. Finite pencil eigenvalues against root oracles of the scalar approximants.
Outcome scalar_equivalence()
{
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> order(6, 14);
  double worst_cauchy = 0.0;
  double worst_cheb = 0.0;
  std::size_t compared = 0;
  for (int instance = 0; instance < 20; ++instance)
  {
    // Random analytic scalar function: two zeros, an exponential factor and a nearby pole.
    const Complex r1(0.5 * unit(rng), 0.5 * unit(rng));
    const Complex r2(0.5 * unit(rng), 0.5 * unit(rng));
    const double growth = unit(rng);
    const Complex pole = std::polar(1.4 + 0.4 * (unit(rng) + 1.0), std::numbers::pi * unit(rng));
    const Complex weight(unit(rng), unit(rng));
    const auto f = [=](Complex z) { return (z - r1) * (z - r2) * std::exp(growth * z) + weight / (z - pole); };
    const auto t = scalar(f);
    const auto m = static_cast<std::size_t>(order(rng));

    // Cauchy approximant: roots of the numerator sum_i b_i prod_{j != i} (z - sigma_j).
    const QuadratureRule rule = instance % 2 == 0 ? QuadratureRule::Trapezoid : QuadratureRule::GaussLegendre;
    const RationalApproximant ra = build_rational(t, make_quadrature(rule, Circle{0.0, 1.0}, m));
    std::vector<Complex> numerator(m + 1, 0.0);
    for (std::size_t i = 0; i <= m; ++i)
    {
      std::vector<Complex> others;
      for (std::size_t j = 0; j <= m; ++j)
      {
        if (j != i)
        {
          others.push_back(ra.poles[j]);
        }
      }
      const auto term = testutil::poly_from_roots(others, ra.coefficients[i](0, 0));
      for (std::size_t k = 0; k < term.size(); ++k)
      {
        numerator[k] += term[k];
      }
    }
    const auto rational = [&](Complex z) {
      Complex s = 0.0;
      for (std::size_t i = 0; i <= m; ++i)
      {
        s += ra.coefficients[i](0, 0) / (z - ra.poles[i]);
      }
      return s;
    };
    const auto rational_d = [&](Complex z) {
      Complex s = 0.0;
      for (std::size_t i = 0; i <= m; ++i)
      {
        s -= ra.coefficients[i](0, 0) / ((z - ra.poles[i]) * (z - ra.poles[i]));
      }
      return s;
    };
    std::vector<Complex> cauchy_oracle;
    for (const Complex z : testutil::polynomial_roots(numerator))
    {
      cauchy_oracle.push_back(testutil::newton_polish(rational, rational_d, z));
    }
    const Pencil pc = assemble_cauchy(ra.coefficients, ra.poles);
    const auto cauchy_found =
        lambdas(pencil_eig_dense_available(pc, Complex(0.05, 0.03), static_cast<std::size_t>(pc.a.rows())));
    worst_cauchy = std::max(worst_cauchy, relative_match(cauchy_found, cauchy_oracle, compared));

    // Chebyshev interpolant on an interval, roots in the scaled variable. The pole sits close
    // to the interval so the interpolant is not resolved to rounding level and its top
    // coefficient stays well away from zero.
    const Interval iv{-1.0 + 0.2 * unit(rng), 1.0 + 0.2 * unit(rng)};
    const Complex near_pole = iv.from_scaled(Complex(0.8 * unit(rng), unit(rng) < 0.0 ? -0.3 : 0.3));
    const auto tc = scalar([=](Complex z) {
      return (z - r1) * (z - r2) * std::exp(growth * z) + weight / (z - near_pole);
    });
    const ChebyshevApproximant ca = build_chebyshev(tc, iv, m);
    const auto basis = testutil::chebyshev_monomials(m);
    std::vector<Complex> mono(m + 1, 0.0);
    for (std::size_t i = 0; i <= m; ++i)
    {
      for (std::size_t k = 0; k < basis[i].size(); ++k)
      {
        mono[k] += ca.coefficients[i](0, 0) * basis[i][k];
      }
    }
    const auto cheb = [&](Complex s) {
      Complex v = 0.0;
      for (std::size_t i = 0; i <= m; ++i)
      {
        v += ca.coefficients[i](0, 0) * testutil::chebyshev_t(i, s);
      }
      return v;
    };
    const auto cheb_d = [&](Complex s) {
      // d/ds T_i = i U_{i-1}; U by its own recurrence.
      Complex v = 0.0;
      Complex u_prev = 0.0;
      Complex u = 1.0;
      for (std::size_t i = 1; i <= m; ++i)
      {
        v += ca.coefficients[i](0, 0) * static_cast<double>(i) * u;
        const Complex next = 2.0 * s * u - u_prev;
        u_prev = u;
        u = next;
      }
      return v;
    };
    std::vector<Complex> cheb_oracle;
    for (const Complex s : testutil::polynomial_roots(mono))
    {
      cheb_oracle.push_back(testutil::newton_polish(cheb, cheb_d, s));
    }
    const Pencil ph = assemble_chebyshev(ca.coefficients);
    const auto cheb_found =
        lambdas(pencil_eig_dense_available(ph, Complex(0.05, 0.03), static_cast<std::size_t>(ph.a.rows())));
    worst_cheb = std::max(worst_cheb, relative_match(cheb_found, cheb_oracle, compared));
  }
  Outcome o;
  o.pass = worst_cauchy <= kScalarRootTol && worst_cheb <= kScalarRootTol;
  o.detail = "20 instances, " + std::to_string(compared) + " oracle roots in |z| <= " +
             fmt("%.0f", kScanRadius) + ", worst relative deviation Cauchy " + fmt("%.2e", worst_cauchy) + ", Chebyshev " +
             fmt("%.2e", worst_cheb) + " (max " + fmt("%.0e", kScalarRootTol) + ")";
  return o;
}

struct Recovery
{
  double deviation = 0.0;
  double residual = 0.0;
  bool complete = true;
};

Recovery recover(const GalleryProblem &g, const Contour &domain, std::size_t inside)
{
  SolverConfig cfg;
  cfg.m = 25;
  cfg.k = inside;
  cfg.subspace_dim = static_cast<std::size_t>(g.problem.n);
  const EigenResult r = reduced_subspace_iteration(g.problem, cfg, domain);
  Recovery out;
  std::vector<Complex> oracle;
  for (const Complex z : *g.reference)
  {
    if (contains(domain, z))
    {
      oracle.push_back(z);
    }
  }
  out.complete = oracle.size() == inside && r.pairs.size() == inside;
  for (const Complex z : oracle)
  {
    double d = std::numeric_limits<double>::infinity();
    for (const auto &p : r.pairs)
    {
      d = std::min(d, std::abs(p.lambda - z));
    }
    out.deviation = std::max(out.deviation, d);
  }
  for (const auto &p : r.pairs)
  {
    out.residual = std::max(out.residual, residual(g.problem, p.lambda, p.u));
  }
  return out;
}

// 4. End-to-end recovery on the delay and quadratic instances.
Outcome spectral_recovery()
{
  Recovery worst;
  std::string detail;
  for (const Index n : {3, 6})
  {
    const Index inside = n == 3 ? 2 : 3;
    const auto d = standard_delay(n, inside, 100 + static_cast<std::uint64_t>(n));
    const auto q = standard_quadratic(n, inside, 200 + static_cast<std::uint64_t>(n));
    for (const GalleryProblem *g : {&d, &q})
    {
      const Recovery r = recover(*g, *g->domain, static_cast<std::size_t>(inside));
      worst.deviation = std::max(worst.deviation, r.deviation);
      worst.residual = std::max(worst.residual, r.residual);
      worst.complete = worst.complete && r.complete;
    }
  }
  Outcome o;
  o.pass = worst.complete && worst.deviation <= kSpectralTol && worst.residual <= kResidualTol;
  o.detail = std::string("delay + quadratic, n in {3, 6}, m = 25: ") +
             (worst.complete ? "all inside eigenvalues found" : "eigenvalues missing") +
             ", max |dlambda| " + fmt("%.2e", worst.deviation) + " (max " + fmt("%.0e", kSpectralTol) +
             "), max residual " + fmt("%.2e", worst.residual) + " (max " + fmt("%.0e", kResidualTol) + ")";
  return o;
}

// 5. Reduced iteration with nu = 20, q = 10, tol = 1e-12 against full-pencil Arnoldi.
Outcome reduced_convergence()
{
  const auto g = standard_delay(30, 6, 2024, false);
  SolverConfig cfg;
  cfg.m = 25;
  cfg.subspace_dim = 20;
  cfg.power_steps = 10;
  cfg.tol = 1e-12;
  cfg.k = 6;
  cfg.max_outer = kMaxOuter;
  Outcome o;
  EigenResult reduced;
  try
  {
    reduced = reduced_subspace_iteration(g.problem, cfg, *g.domain);
  }
  catch (const NotConverged &e)
  {
    o.detail = "reduced iteration did not converge in " + std::to_string(e.result().outer_iterations) +
               " outer iterations";
    return o;
  }
  const EigenResult arnoldi = full_pencil_arnoldi(g.problem, cfg, *g.domain);
  double worst_ratio = 0.0;
  double worst_reduced = 0.0;
  double worst_arnoldi = 0.0;
  bool matched = reduced.pairs.size() == arnoldi.pairs.size() && !reduced.pairs.empty();
  for (const auto &p : reduced.pairs)
  {
    const EigenPair *best = nullptr;
    for (const auto &a : arnoldi.pairs)
    {
      if (best == nullptr || std::abs(a.lambda - p.lambda) < std::abs(best->lambda - p.lambda))
      {
        best = &a;
      }
    }
    if (best == nullptr || std::abs(best->lambda - p.lambda) > kSpectralTol)
    {
      matched = false;
      continue;
    }
    worst_ratio = std::max(worst_ratio, p.residual / best->residual);
    worst_reduced = std::max(worst_reduced, p.residual);
    worst_arnoldi = std::max(worst_arnoldi, best->residual);
  }
  o.pass = reduced.converged && reduced.outer_iterations <= kMaxOuter && matched &&
           worst_ratio <= kArnoldiFactor;
  o.detail = "n = 30, " + std::to_string(reduced.outer_iterations) + " outer iteration(s) (max " +
             std::to_string(kMaxOuter) + "), " + std::to_string(reduced.pairs.size()) +
             " pairs, max residual reduced " + fmt("%.2e", worst_reduced) + " vs Arnoldi " +
             fmt("%.2e", worst_arnoldi) + ", worst ratio " + fmt("%.2e", worst_ratio) + " (max " +
             fmt("%.0f", kArnoldiFactor) + ")" + (matched ? "" : ", eigenvalue sets differ");
  return o;
}

// 6. nu = n with U = I: the reduced solve is the full dense solve.
Outcome identity_collapse()
{
  const auto g = standard_quadratic(6, 3, 31);
  const auto approx = build_rational(g.problem, trapezoid_rule(*g.domain, 25));
  const Basis identity{DenseMatrix::Identity(6, 6)};
  const auto projected = project_coefficients(identity, approx.coefficients);
  const Complex shift = 0.0;
  const std::size_t k = 12;
  std::vector<Complex> reduced;
  for (const auto &p : solve_reduced_cauchy(projected, approx.poles, shift, k))
  {
    reduced.push_back(p.lambda);
  }
  const auto full = lambdas(pencil_eig_dense(assemble_cauchy(approx.coefficients, approx.poles), shift, k));
  const double d = testutil::multiset_distance(reduced, full);
  Outcome o;
  o.pass = d <= kCollapseTol;
  o.detail = std::to_string(k) + " eigenvalues nearest the shift, multiset distance " + fmt("%.2e", d) +
             " (max " + fmt("%.0e", kCollapseTol) + ")";
  return o;
}

// 7. Interpolation at the Chebyshev points and the three-term recurrence of the basis.
Outcome chebyshev_exactness()
{
  std::mt19937_64 rng(4242);
  const Index n = 4;
  const DenseMatrix a0 = testutil::random_matrix(n, n, rng);
  const DenseMatrix a1 = testutil::random_matrix(n, n, rng);
  const DenseMatrix a2 = testutil::random_matrix(n, n, rng);
  NlevpProblem t;
  t.n = n;
  t.evaluate = [=](Complex z) -> DenseMatrix { return a0 + std::exp(z) * a1 + a2 / (z - 3.0); };
  const Interval iv{-1.0, 2.0};
  double node_error = 0.0;
  for (const std::size_t m : {5u, 10u, 20u, 40u})
  {
    const auto approx = build_chebyshev(t, iv, m);
    for (const double x : chebyshev_points(iv, m))
    {
      const DenseMatrix exact = t(x);
      node_error = std::max(node_error, (eval_chebyshev(approx, x) - exact).norm() / exact.norm());
    }
  }
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double recurrence = 0.0;
  std::vector<Complex> tau(41);
  for (int trial = 0; trial < 200; ++trial)
  {
    // Real points of the interval and complex points near it.
    const Complex z = trial % 2 == 0 ? Complex(iv.from_scaled(unit(rng)))
                                     : iv.from_scaled(Complex(unit(rng), 0.2 * unit(rng)));
    const Complex s = iv.to_scaled(z);
    cheb_basis_values(iv, z, tau);
    for (std::size_t i = 1; i + 1 < tau.size(); ++i)
    {
      const double size = std::max({1.0, std::abs(tau[i + 1]), std::abs(tau[i]), std::abs(tau[i - 1])});
      recurrence = std::max(recurrence, std::abs(tau[i + 1] - 2.0 * s * tau[i] + tau[i - 1]) / size);
    }
  }
  Outcome o;
  o.pass = node_error <= kNodeRelTol && recurrence <= kRecurrenceTol;
  o.detail = "node error " + fmt("%.2e", node_error) + " (max " + fmt("%.0e", kNodeRelTol) +
             "), recurrence defect " + fmt("%.2e", recurrence) + " (max " + fmt("%.0e", kRecurrenceTol) + ")";
  return o;
}

std::string slurp(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 8. Two CLI runs with the same config and seed write identical reports.
Outcome determinism(const char *cli)
{
  Outcome o;
  if (cli == nullptr)
  {
    o.detail = "no nlevp executable given";
    return o;
  }
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("nlevp_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "mode = solve\nproblem.name = delay\nproblem.n = 6\nproblem.inside = 3\nproblem.seed = 5\n"
           "solver.k = 3\nsolver.seed = 99\n";
  }
  int status[2];
  for (int run = 0; run < 2; ++run)
  {
    const std::string cmd = "\"" + std::string(cli) + "\" solve \"" + (dir / "run.cfg").string() + "\" > \"" +
                            (dir / ("out" + std::to_string(run))).string() + "\" 2> /dev/null";
    status[run] = std::system(cmd.c_str());
  }
  const std::string a = slurp(dir / "out0");
  const std::string b = slurp(dir / "out1");
  fs::remove_all(dir);
  o.pass = status[0] == 0 && status[1] == 0 && !a.empty() && a == b;
  o.detail = std::to_string(a.size()) + "-byte report, exit statuses " + std::to_string(status[0]) + "/" +
             std::to_string(status[1]) + (a == b ? ", identical" : ", reports differ");
  return o;
}

}  // namespace

int main(int argc, char **argv)
{
  const char *cli = argc > 1 ? argv[1] : nullptr;
  const std::pair<const char *, std::function<Outcome()>> criteria[] = {
      {"trapezoid decay rate", decay_rate},
      {"structured step vs dense solve", structured_steps},
      {"scalar pencil equivalence", scalar_equivalence},
      {"end-to-end spectral recovery", spectral_recovery},
      {"reduced iteration convergence", reduced_convergence},
      {"identity projection collapse", identity_collapse},
      {"Chebyshev interpolation exactness", chebyshev_exactness},
      {"CLI determinism", [cli] { return determinism(cli); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < std::size(criteria); ++i)
  {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try
    {
      o = criteria[i].second();
    }
    catch (const std::exception &e)
    {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < kBudget[i];
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s [%zu] %s: %s; %.2f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), seconds, kBudget[i], in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
