// SPDX-License-Identifier: Apache-2.0

#include "nlevp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include "nlevp/errors.hpp"

namespace nlevp
{

double norm_inf(const DenseMatrix &a)
{
  if (a.size() == 0)
  {
    return 0.0;
  }
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

bool all_finite(const DenseMatrix &a)
{
  for (Index j = 0; j < a.cols(); ++j)
  {
    for (Index i = 0; i < a.rows(); ++i)
    {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag()))
      {
        return false;
      }
    }
  }
  return true;
}

LUFactors lu_factor(const DenseMatrix &a, double reference_norm)
{
  if (a.rows() != a.cols())
  {
    throw Error(ErrorCode::DimensionMismatch, "lu_factor requires a square matrix");
  }
  if (!all_finite(a))
  {
    throw Error(ErrorCode::SingularMatrix, "matrix has non-finite entries");
  }
  const Index n = a.rows();
  LUFactors f{a, std::vector<Index>(static_cast<std::size_t>(n))};
  std::iota(f.perm.begin(), f.perm.end(), Index{0});
  const double scale = reference_norm >= 0.0 ? reference_norm : norm_inf(a);
  const double tiny = 1e-14 * scale;

  DenseMatrix &lu = f.lu;
  for (Index k = 0; k < n; ++k)
  {
    Index p = 0;
    const double pivot = lu.col(k).tail(n - k).cwiseAbs().maxCoeff(&p);
    p += k;
    if (pivot <= tiny)
    {
      throw Error(ErrorCode::SingularMatrix, "pivot below threshold",
                  static_cast<std::size_t>(k));
    }
    if (p != k)
    {
      lu.row(k).swap(lu.row(p));
      std::swap(f.perm[static_cast<std::size_t>(k)], f.perm[static_cast<std::size_t>(p)]);
    }
    const Index rest = n - k - 1;
    if (rest > 0)
    {
      lu.col(k).tail(rest) /= lu(k, k);
      lu.bottomRightCorner(rest, rest).noalias() -=
          lu.col(k).tail(rest) * lu.row(k).tail(rest);
    }
  }
  return f;
}

DenseMatrix lu_solve(const LUFactors &f, const DenseMatrix &b)
{
  if (b.rows() != f.size())
  {
    throw Error(ErrorCode::DimensionMismatch, "right-hand side length does not match factors");
  }
  DenseMatrix x(b.rows(), b.cols());
  for (Index i = 0; i < f.size(); ++i)
  {
    x.row(i) = b.row(f.perm[static_cast<std::size_t>(i)]);
  }
  f.lu.triangularView<Eigen::UnitLower>().solveInPlace(x);
  f.lu.triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Vector lu_solve(const LUFactors &f, const Vector &b)
{
  if (b.size() != f.size())
  {
    throw Error(ErrorCode::DimensionMismatch, "right-hand side length does not match factors");
  }
  Vector x(b.size());
  for (Index i = 0; i < f.size(); ++i)
  {
    x(i) = b(f.perm[static_cast<std::size_t>(i)]);
  }
  f.lu.triangularView<Eigen::UnitLower>().solveInPlace(x);
  f.lu.triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Vector random_complex_vector(Index n, std::mt19937_64 &rng)
{
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Vector v(n);
  for (Index i = 0; i < n; ++i)
  {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = Complex(re, im);
  }
  return v;
}

DenseMatrix random_complex_matrix(Index rows, Index cols, std::mt19937_64 &rng)
{
  DenseMatrix a(rows, cols);
  for (Index j = 0; j < cols; ++j)
  {
    a.col(j) = random_complex_vector(rows, rng);
  }
  return a;
}

namespace
{

constexpr double kDependenceTol = 1e-12;
constexpr std::uint64_t kReplacementSeed = 0x9e3779b97f4a7c15ULL;

void project_out(const DenseMatrix &q, Index count, Eigen::Ref<Vector> w)
{
  for (Index i = 0; i < count; ++i)
  {
    w -= q.col(i) * q.col(i).dot(w);
  }
}

}  // namespace

Basis orthonormalize(const DenseMatrix &v)
{
  const Index n = v.rows();
  const Index k = v.cols();
  if (k > n)
  {
    throw Error(ErrorCode::DimensionMismatch, "more columns than rows in orthonormalize");
  }
  Basis basis{DenseMatrix(n, k)};
  DenseMatrix &q = basis.columns;
  std::mt19937_64 rng(kReplacementSeed);
  for (Index j = 0; j < k; ++j)
  {
    Vector w = v.col(j);
    double original = w.norm();
    project_out(q, j, w);
    project_out(q, j, w);
    while (!(w.norm() > kDependenceTol * original))
    {
      // Degenerate column: substitute a random direction and orthogonalize it instead.
      w = random_complex_vector(n, rng);
      original = w.norm();
      project_out(q, j, w);
      project_out(q, j, w);
    }
    q.col(j) = w / w.norm();
  }
  return basis;
}

namespace
{

// Complex Givens rotation G = [c s; -conj(s) c] with G*[a; b] = [r; 0].
struct Givens
{
  double c = 1.0;
  Complex s = 0.0;
};

Givens make_givens(Complex a, Complex b)
{
  const double abs_a = std::abs(a);
  const double abs_b = std::abs(b);
  if (abs_b == 0.0)
  {
    return {};
  }
  if (abs_a == 0.0)
  {
    return {0.0, std::conj(b) / abs_b};
  }
  const double r = std::hypot(abs_a, abs_b);
  const Complex phase = a / abs_a;
  return {abs_a / r, phase * std::conj(b) / r};
}

Complex wilkinson_shift(const DenseMatrix &h, Index hi)
{
  const Complex a = h(hi - 1, hi - 1);
  const Complex b = h(hi - 1, hi);
  const Complex c = h(hi, hi - 1);
  const Complex d = h(hi, hi);
  const Complex half = 0.5 * (a - d);
  const Complex disc = std::sqrt(half * half + b * c);
  const Complex mid = 0.5 * (a + d);
  const Complex l1 = mid + disc;
  const Complex l2 = mid - disc;
  return std::abs(l1 - d) <= std::abs(l2 - d) ? l1 : l2;
}

// One explicitly shifted QR step on the active window [lo, hi]. Only the window is
// updated, which is all the eigenvalue computation needs.
void qr_sweep(DenseMatrix &h, Index lo, Index hi, Complex mu)
{
  for (Index i = lo; i <= hi; ++i)
  {
    h(i, i) -= mu;
  }
  std::vector<Givens> rotations;
  rotations.reserve(static_cast<std::size_t>(hi - lo));
  for (Index k = lo; k < hi; ++k)
  {
    const Givens g = make_givens(h(k, k), h(k + 1, k));
    for (Index j = k; j <= hi; ++j)
    {
      const Complex x = h(k, j);
      const Complex y = h(k + 1, j);
      h(k, j) = g.c * x + g.s * y;
      h(k + 1, j) = -std::conj(g.s) * x + g.c * y;
    }
    h(k + 1, k) = 0.0;
    rotations.push_back(g);
  }
  for (Index k = lo; k < hi; ++k)
  {
    const Givens &g = rotations[static_cast<std::size_t>(k - lo)];
    const Index last = std::min(k + 1, hi);
    for (Index i = lo; i <= last; ++i)
    {
      const Complex x = h(i, k);
      const Complex y = h(i, k + 1);
      h(i, k) = x * g.c + y * std::conj(g.s);
      h(i, k + 1) = -x * g.s + y * g.c;
    }
  }
  for (Index i = lo; i <= hi; ++i)
  {
    h(i, i) += mu;
  }
}

}  // namespace

std::vector<Complex> hessenberg_eig(const DenseMatrix &h_in)
{
  if (h_in.rows() != h_in.cols())
  {
    throw Error(ErrorCode::DimensionMismatch, "hessenberg_eig requires a square matrix");
  }
  const Index n = h_in.rows();
  DenseMatrix h = h_in;
  std::vector<Complex> values(static_cast<std::size_t>(n));
  const double hnorm = h.norm();
  const double floor = std::numeric_limits<double>::epsilon() * hnorm;
  const std::size_t budget = 30 * static_cast<std::size_t>(std::max<Index>(n, 1));
  std::size_t sweeps = 0;
  int its = 0;
  Index hi = n - 1;
  while (hi >= 0)
  {
    Index lo = hi;
    for (; lo > 0; --lo)
    {
      const double s = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (std::abs(h(lo, lo - 1)) <= std::max(1e-13 * s, floor))
      {
        h(lo, lo - 1) = 0.0;
        break;
      }
    }
    if (lo == hi)
    {
      values[static_cast<std::size_t>(hi)] = h(hi, hi);
      --hi;
      its = 0;
      continue;
    }
    if (++sweeps > budget)
    {
      throw Error(ErrorCode::NoConvergence, "QR iteration exceeded its sweep budget",
                  static_cast<std::size_t>(hi));
    }
    ++its;
    Complex mu;
    if (its % 10 == 0)
    {
      // Exceptional shift to break cycles.
      mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1));
    }
    else
    {
      mu = wilkinson_shift(h, hi);
    }
    qr_sweep(h, lo, hi, mu);
  }
  return values;
}

namespace
{

// Inverse iteration on (H - lambda*I) for upper-Hessenberg H. Elimination pivots only
// between adjacent rows, so factoring costs O(n^2). Tiny pivots are replaced by
// 1e-14*||H|| to keep the solve finite when lambda is an exact eigenvalue.
Vector hessenberg_inverse_iteration(const DenseMatrix &h, Complex lambda, double hnorm,
                                    std::uint64_t seed)
{
  const Index n = h.rows();
  DenseMatrix u = h;
  u.diagonal().array() -= lambda;
  std::vector<char> swapped(static_cast<std::size_t>(n), 0);
  std::vector<Complex> mult(static_cast<std::size_t>(n), 0.0);
  for (Index k = 0; k + 1 < n; ++k)
  {
    const auto ks = static_cast<std::size_t>(k);
    if (std::abs(u(k + 1, k)) > std::abs(u(k, k)))
    {
      u.row(k).tail(n - k).swap(u.row(k + 1).tail(n - k));
      swapped[ks] = 1;
    }
    if (u(k, k) != 0.0)
    {
      mult[ks] = u(k + 1, k) / u(k, k);
      u.row(k + 1).tail(n - k) -= mult[ks] * u.row(k).tail(n - k);
    }
    u(k + 1, k) = 0.0;
  }
  double tiny = 1e-14 * hnorm;
  if (tiny == 0.0)
  {
    tiny = std::numeric_limits<double>::min();
  }
  for (Index k = 0; k < n; ++k)
  {
    if (std::abs(u(k, k)) < tiny)
    {
      u(k, k) = tiny;
    }
  }

  auto solve = [&](Vector b) {
    for (Index k = 0; k + 1 < n; ++k)
    {
      const auto ks = static_cast<std::size_t>(k);
      if (swapped[ks] != 0)
      {
        std::swap(b(k), b(k + 1));
      }
      b(k + 1) -= mult[ks] * b(k);
    }
    u.triangularView<Eigen::Upper>().solveInPlace(b);
    return b;
  };

  std::mt19937_64 rng(seed);
  Vector x = random_complex_vector(n, rng);
  for (int step = 0; step < 2; ++step)
  {
    x = solve(x);
    const double nx = x.norm();
    if (!(nx > 0.0) || !std::isfinite(nx))
    {
      break;
    }
    x /= nx;
  }
  return x;
}

}  // namespace

DenseEigenSolver::DenseEigenSolver(const DenseMatrix &a)
{
  if (a.rows() != a.cols())
  {
    throw Error(ErrorCode::DimensionMismatch, "dense_eig requires a square matrix");
  }
  const Index n = a.rows();
  norm_ = a.norm();
  hessenberg_ = a;
  DenseMatrix &h = hessenberg_;
  for (Index k = 0; k + 2 < n; ++k)
  {
    const Index len = n - k - 1;
    Vector v = h.col(k).tail(len);
    const double alpha = v.norm();
    if (alpha == 0.0)
    {
      reflectors_.emplace_back();
      continue;
    }
    const Complex phase = v(0) == 0.0 ? Complex(1.0) : v(0) / std::abs(v(0));
    v(0) += phase * alpha;
    v.normalize();
    h.bottomRightCorner(len, n - k).noalias() -=
        2.0 * v * (v.adjoint() * h.bottomRightCorner(len, n - k));
    h.rightCols(len).noalias() -= 2.0 * (h.rightCols(len) * v) * v.adjoint();
    h.col(k).tail(len - 1).setZero();
    reflectors_.push_back(std::move(v));
  }
  values_ = hessenberg_eig(h);
}

Vector DenseEigenSolver::eigenvector(std::size_t i) const
{
  const Index n = hessenberg_.rows();
  Vector x = hessenberg_inverse_iteration(hessenberg_, values_.at(i), norm_,
                                          0x243f6a8885a308d3ULL + i);
  for (std::size_t r = reflectors_.size(); r-- > 0;)
  {
    const Vector &v = reflectors_[r];
    if (v.size() == 0)
    {
      continue;
    }
    const Index len = n - static_cast<Index>(r) - 1;
    auto seg = x.tail(len);
    const Complex proj = v.dot(seg);
    seg -= 2.0 * proj * v;
  }
  const double nx = x.norm();
  if (nx > 0.0)
  {
    x /= nx;
  }
  return x;
}

EigenPairs dense_eig(const DenseMatrix &a)
{
  DenseEigenSolver solver(a);
  EigenPairs pairs{solver.eigenvalues(), DenseMatrix(a.rows(), a.rows())};
  for (std::size_t i = 0; i < pairs.values.size(); ++i)
  {
    pairs.vectors.col(static_cast<Index>(i)) = solver.eigenvector(i);
  }
  return pairs;
}

}  // namespace nlevp
