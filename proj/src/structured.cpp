// SPDX-License-Identifier: Apache-2.0

#include "nlevp/structured.hpp"

#include "nlevp/errors.hpp"

namespace nlevp
{

namespace
{

Index uniform_size(std::span<const DenseMatrix> coefficients)
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

void check_layout(const StructuredFactorization &f, const BlockVector &w)
{
  if (!(w.kind == f.kind()) || w.data.size() != f.kind().dimension())
  {
    throw Error(ErrorCode::DimensionMismatch, "block vector layout does not match factorization");
  }
}

}  // namespace

StructuredFactorization factor_cauchy(std::span<const DenseMatrix> coefficients,
                                      std::span<const Complex> poles, Complex shift,
                                      bool reduced)
{
  const Index n = uniform_size(coefficients);
  if (poles.size() != coefficients.size())
  {
    throw Error(ErrorCode::DimensionMismatch, "one pole per coefficient required");
  }
  StructuredFactorization f;
  f.kind_ = cauchy_kind(n, coefficients.size(), reduced);
  f.shift_ = shift;
  f.coefficients_ = std::make_shared<const std::vector<DenseMatrix>>(coefficients.begin(),
                                                                     coefficients.end());
  f.poles_.assign(poles.begin(), poles.end());
  f.inverse_offsets_.resize(poles.size());

  DenseMatrix s = DenseMatrix::Zero(n, n);
  double reference = 0.0;
  for (std::size_t i = 0; i < poles.size(); ++i)
  {
    const Complex offset = poles[i] - shift;
    if (std::abs(offset) <= 1e-13 * (1.0 + std::abs(poles[i])))
    {
      throw Error(ErrorCode::ShiftOnPole, "shift coincides with a pole", i);
    }
    f.inverse_offsets_[i] = 1.0 / offset;
    s += coefficients[i] * f.inverse_offsets_[i];
    reference += norm_inf(coefficients[i]) / std::abs(offset);
  }
  try
  {
    f.lu_ = lu_factor(s, reference);
  }
  catch (const Error &e)
  {
    if (e.code() != ErrorCode::SingularMatrix)
    {
      throw;
    }
    throw Error(ErrorCode::SingularSchur,
                "Schur complement is singular; the shift is an eigenvalue of the approximant");
  }
  return f;
}

StructuredFactorization factor_chebyshev(std::span<const DenseMatrix> coefficients, bool reduced)
{
  const Index n = uniform_size(coefficients);
  if (coefficients.size() < 3)
  {
    throw Error(ErrorCode::OrderTooSmall, "Chebyshev linearization needs m >= 2");
  }
  StructuredFactorization f;
  f.kind_ = chebyshev_kind(n, coefficients.size(), reduced);
  f.shift_ = 0.0;
  f.coefficients_ = std::make_shared<const std::vector<DenseMatrix>>(coefficients.begin(),
                                                                     coefficients.end());
  const std::size_t m = coefficients.size() - 1;
  const std::size_t q = m / 2;
  DenseMatrix g = DenseMatrix::Zero(n, n);
  double reference = 0.0;
  for (std::size_t i = 0; i <= q; ++i)
  {
    const double sign = (i % 2 == 0) ? -1.0 : 1.0;  // (-1)^{i+1}
    g += sign * coefficients[2 * i];
    reference += norm_inf(coefficients[2 * i]);
  }
  try
  {
    f.lu_ = lu_factor(g, reference);
  }
  catch (const Error &e)
  {
    if (e.code() != ErrorCode::SingularMatrix)
    {
      throw;
    }
    throw Error(ErrorCode::SingularG,
                "G is singular; the interval center is an eigenvalue of the interpolant");
  }
  return f;
}

BlockVector apply_M(const PencilKind &kind, const DenseMatrix *last_coefficient,
                    const BlockVector &w)
{
  if (!(w.kind == kind) || w.data.size() != kind.dimension())
  {
    throw Error(ErrorCode::DimensionMismatch, "block vector layout does not match kind");
  }
  BlockVector y = w;
  const Index last = kind.block_count - 1;
  if (kind.is_cauchy())
  {
    y.block(last).setZero();
    return y;
  }
  if (last_coefficient == nullptr || last_coefficient->rows() != kind.block_size ||
      last_coefficient->cols() != kind.block_size)
  {
    throw Error(ErrorCode::DimensionMismatch, "Chebyshev M needs B_m of the block size");
  }
  for (Index i = 1; i < last; ++i)
  {
    y.block(i) *= 2.0;
  }
  y.block(last) = 2.0 * (*last_coefficient) * w.block(last);
  return y;
}

BlockVector cauchy_step(const StructuredFactorization &f, const BlockVector &w)
{
  check_layout(f, w);
  if (!f.kind().is_cauchy())
  {
    throw Error(ErrorCode::DimensionMismatch, "cauchy_step needs a Cauchy factorization");
  }
  const auto &b = f.coefficients();
  const auto &inv = f.inverse_offsets();
  const Index n = f.kind().block_size;

  // M w keeps the v blocks and drops u, so only v enters the right-hand side.
  Vector rhs = Vector::Zero(n);
  for (std::size_t i = 0; i < b.size(); ++i)
  {
    rhs.noalias() += inv[i] * (b[i] * w.block(static_cast<Index>(i)));
  }
  BlockVector out(f.kind());
  const Vector u = lu_solve(f.lu(), rhs);
  out.u() = u;
  for (std::size_t i = 0; i < b.size(); ++i)
  {
    const auto bi = static_cast<Index>(i);
    out.block(bi) = (w.block(bi) - u) * inv[i];
  }
  return out;
}

BlockVector chebyshev_step(const StructuredFactorization &f, const BlockVector &w)
{
  check_layout(f, w);
  if (f.kind().is_cauchy())
  {
    throw Error(ErrorCode::DimensionMismatch, "chebyshev_step needs a Chebyshev factorization");
  }
  const auto &b = f.coefficients();
  const auto m = static_cast<Index>(b.size()) - 1;  // block count
  const BlockVector y = apply_M(f.kind(), &b.back(), w);

  // Rows 0..m-2 give x_{j} = y_{j-1} - x_{j-2} (x_{-1} = 0). Writing x_j = k_j + c_j x_0,
  // odd blocks have c_j = 0 and even blocks c_{2i} = (-1)^i. The known parts k_j are
  // stored in place and their contribution to the last row accumulated on the fly.
  BlockVector out(f.kind());
  Vector rhs = y.block(m - 1);
  for (Index j = 1; j < m; ++j)
  {
    if (j == 1)
    {
      out.block(1) = y.block(0);
    }
    else
    {
      out.block(j) = y.block(j - 1) - out.block(j - 2);
    }
    // Last row: L_j = -B_j except L_{m-2} = B_m - B_{m-2}.
    const auto ju = static_cast<std::size_t>(j);
    if (j == m - 2)
    {
      rhs.noalias() -= (b[static_cast<std::size_t>(m)] - b[ju]) * out.block(j);
    }
    else
    {
      rhs.noalias() += b[ju] * out.block(j);
    }
  }
  const Vector u = lu_solve(f.lu(), rhs);
  out.block(0) = u;
  for (Index j = 2; j < m; j += 2)
  {
    const double sign = ((j / 2) % 2 == 0) ? 1.0 : -1.0;
    out.block(j) += sign * u;
  }
  return out;
}

BlockVector structured_step(const StructuredFactorization &f, const BlockVector &w)
{
  return f.kind().is_cauchy() ? cauchy_step(f, w) : chebyshev_step(f, w);
}

}  // namespace nlevp
