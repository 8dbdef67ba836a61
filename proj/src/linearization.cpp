// SPDX-License-Identifier: Apache-2.0

#include "nlevp/linearization.hpp"

#include <algorithm>
#include <numeric>
#include "nlevp/errors.hpp"

namespace nlevp
{

PencilKind cauchy_kind(Index block_size, std::size_t coefficient_count, bool reduced)
{
  return {reduced ? PencilTag::CauchyReduced : PencilTag::CauchyFull, block_size,
          static_cast<Index>(coefficient_count) + 1};
}

PencilKind chebyshev_kind(Index block_size, std::size_t coefficient_count, bool reduced)
{
  return {reduced ? PencilTag::ChebyshevReduced : PencilTag::ChebyshevFull, block_size,
          static_cast<Index>(coefficient_count) - 1};
}

BlockVector::BlockVector(const PencilKind &k, Vector values) : kind(k), data(std::move(values))
{
  if (data.size() != kind.dimension())
  {
    throw Error(ErrorCode::DimensionMismatch, "vector length does not match the block layout");
  }
}

namespace
{

Index check_uniform(std::span<const DenseMatrix> coefficients)
{
  if (coefficients.empty())
  {
    throw Error(ErrorCode::DimensionMismatch, "empty coefficient list");
  }
  const Index n = coefficients.front().rows();
  for (std::size_t i = 0; i < coefficients.size(); ++i)
  {
    if (coefficients[i].rows() != n || coefficients[i].cols() != n)
    {
      throw Error(ErrorCode::DimensionMismatch, "coefficients must be square and uniform", i);
    }
  }
  return n;
}

Pencil cauchy_pencil(std::span<const DenseMatrix> b, std::span<const Complex> poles, bool reduced)
{
  const Index n = check_uniform(b);
  if (poles.size() != b.size())
  {
    throw Error(ErrorCode::DimensionMismatch, "one pole per coefficient required");
  }
  const PencilKind kind = cauchy_kind(n, b.size(), reduced);
  const Index dim = kind.dimension();
  const Index last = kind.block_count - 1;
  Pencil p{DenseMatrix::Zero(dim, dim), DenseMatrix::Zero(dim, dim), kind};
  const DenseMatrix eye = DenseMatrix::Identity(n, n);
  for (std::size_t i = 0; i < b.size(); ++i)
  {
    const auto bi = static_cast<Index>(i);
    p.a.block(bi * n, bi * n, n, n) = poles[i] * eye;
    p.a.block(bi * n, last * n, n, n) = eye;
    p.a.block(last * n, bi * n, n, n) = -b[i];
    p.m.block(bi * n, bi * n, n, n) = eye;
  }
  return p;
}

Pencil chebyshev_pencil(std::span<const DenseMatrix> b, bool reduced)
{
  const Index n = check_uniform(b);
  if (b.size() < 3)
  {
    throw Error(ErrorCode::OrderTooSmall, "Chebyshev linearization needs m >= 2");
  }
  const PencilKind kind = chebyshev_kind(n, b.size(), reduced);
  const Index blocks = kind.block_count;  // m
  const auto m = static_cast<std::size_t>(blocks);
  const Index dim = kind.dimension();
  Pencil p{DenseMatrix::Zero(dim, dim), DenseMatrix::Zero(dim, dim), kind};
  const DenseMatrix eye = DenseMatrix::Identity(n, n);

  p.a.block(0, n, n, n) = eye;
  p.m.block(0, 0, n, n) = eye;
  for (Index i = 1; i + 1 < blocks; ++i)
  {
    p.a.block(i * n, (i - 1) * n, n, n) = eye;
    p.a.block(i * n, (i + 1) * n, n, n) = eye;
    p.m.block(i * n, i * n, n, n) = 2.0 * eye;
  }
  const Index row = (blocks - 1) * n;
  for (std::size_t i = 0; i + 3 <= m; ++i)
  {
    p.a.block(row, static_cast<Index>(i) * n, n, n) = -b[i];
  }
  p.a.block(row, (blocks - 2) * n, n, n) = b[m] - b[m - 2];
  p.a.block(row, (blocks - 1) * n, n, n) = -b[m - 1];
  p.m.block(row, row, n, n) = 2.0 * b[m];
  return p;
}

}  // namespace

Pencil assemble_cauchy(std::span<const DenseMatrix> coefficients, std::span<const Complex> poles)
{
  return cauchy_pencil(coefficients, poles, false);
}

Pencil assemble_chebyshev(std::span<const DenseMatrix> coefficients)
{
  return chebyshev_pencil(coefficients, false);
}

Pencil assemble_reduced(std::span<const DenseMatrix> projected, PencilTag tag,
                        std::span<const Complex> poles)
{
  switch (tag)
  {
    case PencilTag::CauchyFull:
    case PencilTag::CauchyReduced:
      return cauchy_pencil(projected, poles, true);
    case PencilTag::ChebyshevFull:
    case PencilTag::ChebyshevReduced:
      return chebyshev_pencil(projected, true);
  }
  throw Error(ErrorCode::DimensionMismatch, "unknown pencil tag");
}

namespace
{

std::vector<PencilEigenpair> pencil_eig_impl(const Pencil &pencil, Complex shift, std::size_t k,
                                             bool require_all)
{
  const DenseMatrix shifted = pencil.a - shift * pencil.m;
  LUFactors lu;
  try
  {
    lu = lu_factor(shifted);
  }
  catch (const Error &e)
  {
    if (e.code() != ErrorCode::SingularMatrix)
    {
      throw;
    }
    throw Error(ErrorCode::SingularShift, "A - shift*M is numerically singular");
  }
  const DenseMatrix h = lu_solve(lu, pencil.m);
  const DenseEigenSolver solver(h);
  const auto &mu = solver.eigenvalues();
  const double threshold = 1e-12 * solver.norm();

  std::vector<std::size_t> finite;
  for (std::size_t i = 0; i < mu.size(); ++i)
  {
    if (std::abs(mu[i]) > threshold)
    {
      finite.push_back(i);
    }
  }
  std::stable_sort(finite.begin(), finite.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(mu[x]) > std::abs(mu[y]);
  });
  if (finite.size() < k && require_all)
  {
    throw Error(ErrorCode::InsufficientFinite, "fewer finite eigenvalues than requested",
                finite.size());
  }
  finite.resize(std::min(finite.size(), k));

  std::vector<PencilEigenpair> pairs;
  pairs.reserve(finite.size());
  for (const std::size_t i : finite)
  {
    pairs.push_back({shift + 1.0 / mu[i], solver.eigenvector(i)});
  }
  return pairs;
}

}  // namespace

std::vector<PencilEigenpair> pencil_eig_dense(const Pencil &pencil, Complex shift, std::size_t k)
{
  return pencil_eig_impl(pencil, shift, k, true);
}

std::vector<PencilEigenpair> pencil_eig_dense_available(const Pencil &pencil, Complex shift,
                                                        std::size_t k)
{
  return pencil_eig_impl(pencil, shift, k, false);
}

SplitVector extract_eigvec(const BlockVector &w)
{
  if (w.data.size() != w.kind.dimension())
  {
    throw Error(ErrorCode::DimensionMismatch, "vector length does not match the block layout");
  }
  SplitVector out;
  out.u = w.u();
  if (w.kind.is_cauchy())
  {
    for (Index i = 0; i + 1 < w.kind.block_count; ++i)
    {
      out.v.emplace_back(w.block(i));
    }
  }
  else
  {
    for (Index i = 1; i < w.kind.block_count; ++i)
    {
      out.v.emplace_back(w.block(i));
    }
  }
  return out;
}

}  // namespace nlevp
