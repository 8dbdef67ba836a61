// SPDX-License-Identifier: Apache-2.0

#ifndef NLEVP_LINEARIZATION_HPP
#define NLEVP_LINEARIZATION_HPP

#include <span>
#include <vector>
#include "nlevp/linalg.hpp"

//
// Structured linearizations A w = lambda M w of the Cauchy and Chebyshev approximants.
//
// Cauchy layout (m+2 blocks):   w = [v_0; ..; v_m; u],   v_i = u/(lambda - sigma_i)
//   A = [diag(sigma_i I)  1-stack; -B_0 .. -B_m  0],       M = blockdiag(I, .., I, 0)
//
// Chebyshev layout (m blocks):  w = [v_0; ..; v_{m-1}],  v_i = tau_i(lambda) u, v_0 = u
//   row 0:        v_1                                = lambda v_0
//   rows 1..m-2:  v_{i-1} + v_{i+1}                  = 2 lambda v_i
//   row m-1:      -B_0 v_0 - .. - B_{m-3} v_{m-3} + (B_m - B_{m-2}) v_{m-2} - B_{m-1} v_{m-1}
//                                                    = 2 lambda B_m v_{m-1}
// Chebyshev pencils live in the scaled variable s in [-1, 1].
//

namespace nlevp
{

enum class PencilTag
{
  CauchyFull,
  ChebyshevFull,
  CauchyReduced,
  ChebyshevReduced
};

struct PencilKind
{
  PencilTag tag = PencilTag::CauchyFull;
  Index block_size = 0;
  Index block_count = 0;

  bool is_cauchy() const
  {
    return tag == PencilTag::CauchyFull || tag == PencilTag::CauchyReduced;
  }
  bool is_reduced() const
  {
    return tag == PencilTag::CauchyReduced || tag == PencilTag::ChebyshevReduced;
  }
  Index dimension() const { return block_size * block_count; }

  bool operator==(const PencilKind &) const = default;
};

// Layout for coefficients B_0..B_m of size block_size.
PencilKind cauchy_kind(Index block_size, std::size_t coefficient_count, bool reduced = false);
PencilKind chebyshev_kind(Index block_size, std::size_t coefficient_count, bool reduced = false);

// An iterate w split into uniform blocks; the layout is fixed by its kind.
struct BlockVector
{
  PencilKind kind;
  Vector data;

  BlockVector() = default;
  explicit BlockVector(const PencilKind &k) : kind(k), data(Vector::Zero(k.dimension())) {}
  BlockVector(const PencilKind &k, Vector values);

  auto block(Index i) { return data.segment(i * kind.block_size, kind.block_size); }
  auto block(Index i) const { return data.segment(i * kind.block_size, kind.block_size); }

  // The eigenvector part: last block for Cauchy layouts, first for Chebyshev.
  Index u_index() const { return kind.is_cauchy() ? kind.block_count - 1 : 0; }
  auto u() { return block(u_index()); }
  auto u() const { return block(u_index()); }
};

struct Pencil
{
  DenseMatrix a;
  DenseMatrix m;
  PencilKind kind;
};

Pencil assemble_cauchy(std::span<const DenseMatrix> coefficients,
                       std::span<const Complex> poles);

// Throws OrderTooSmall for m < 2 (fewer than three coefficients).
Pencil assemble_chebyshev(std::span<const DenseMatrix> coefficients);

// Same templates with projected coefficients; tag selects the layout. Poles are ignored
// for Chebyshev tags.
Pencil assemble_reduced(std::span<const DenseMatrix> projected, PencilTag tag,
                        std::span<const Complex> poles = {});

struct PencilEigenpair
{
  Complex lambda;
  Vector w;
};

// Forms H = (A - shift M)^{-1} M densely, discards |mu| <= 1e-12 ||H|| as infinite
// eigenvalues and returns the k finite ones nearest the shift, lambda = shift + 1/mu.
// Throws SingularShift or InsufficientFinite.
std::vector<PencilEigenpair> pencil_eig_dense(const Pencil &pencil, Complex shift,
                                              std::size_t k);

// Same, but returns as many finite pairs as exist when fewer than k do.
std::vector<PencilEigenpair> pencil_eig_dense_available(const Pencil &pencil, Complex shift,
                                                        std::size_t k);

struct SplitVector
{
  Vector u;
  std::vector<Vector> v;  // Cauchy: v_0..v_m; Chebyshev: v_1..v_{m-1}
};

SplitVector extract_eigvec(const BlockVector &w);

}  // namespace nlevp

#endif  // NLEVP_LINEARIZATION_HPP
