// SPDX-License-Identifier: Apache-2.0

#ifndef NLEVP_STRUCTURED_HPP
#define NLEVP_STRUCTURED_HPP

#include <memory>
#include <span>
#include <vector>
#include "nlevp/linalg.hpp"
#include "nlevp/linearization.hpp"

//
// Inverse-power steps w+ = (A - shift M)^{-1} M w for the structured pencils, applied
// without assembling A or M. Only one n x n LU is needed per factorization: the Schur
// complement S = sum_i B_i/(sigma_i - shift) for Cauchy layouts, and
// G = sum_{i=0}^{floor(m/2)} (-1)^{i+1} B_{2i} for Chebyshev layouts (shift at the interval
// center, s = 0).
//

namespace nlevp
{

class StructuredFactorization
{
public:
  const PencilKind &kind() const { return kind_; }
  Complex shift() const { return shift_; }
  const std::vector<DenseMatrix> &coefficients() const { return *coefficients_; }
  const std::vector<Complex> &poles() const { return poles_; }
  const LUFactors &lu() const { return lu_; }

  // 1/(sigma_i - shift), Cauchy layouts only.
  const std::vector<Complex> &inverse_offsets() const { return inverse_offsets_; }

private:
  friend StructuredFactorization factor_cauchy(std::span<const DenseMatrix>,
                                               std::span<const Complex>, Complex, bool);
  friend StructuredFactorization factor_chebyshev(std::span<const DenseMatrix>, bool);

  PencilKind kind_;
  Complex shift_ = 0.0;
  std::shared_ptr<const std::vector<DenseMatrix>> coefficients_;
  std::vector<Complex> poles_;
  std::vector<Complex> inverse_offsets_;
  LUFactors lu_;
};

// Throws ShiftOnPole(i) when the shift meets pole i, SingularSchur when S is singular
// (the shift is an eigenvalue of the approximant).
StructuredFactorization factor_cauchy(std::span<const DenseMatrix> coefficients,
                                      std::span<const Complex> poles, Complex shift,
                                      bool reduced = false);

// Throws OrderTooSmall for m < 2 and SingularG when the interval center is an eigenvalue
// of the interpolant.
StructuredFactorization factor_chebyshev(std::span<const DenseMatrix> coefficients,
                                         bool reduced = false);

BlockVector cauchy_step(const StructuredFactorization &f, const BlockVector &w);
BlockVector chebyshev_step(const StructuredFactorization &f, const BlockVector &w);

// Dispatches on the factorization's layout.
BlockVector structured_step(const StructuredFactorization &f, const BlockVector &w);

// M*w. last_coefficient is B_m and is only read for Chebyshev layouts.
BlockVector apply_M(const PencilKind &kind, const DenseMatrix *last_coefficient,
                    const BlockVector &w);

}  // namespace nlevp

#endif  // NLEVP_STRUCTURED_HPP
