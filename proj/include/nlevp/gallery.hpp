// SPDX-License-Identifier: Apache-2.0

#ifndef NLEVP_GALLERY_HPP
#define NLEVP_GALLERY_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>
#include "nlevp/approximants.hpp"
#include "nlevp/contour.hpp"

namespace nlevp
{

enum class OracleKind
{
  ClosedForm,
  CompanionEig,
  NewtonTrace
};

struct GalleryProblem
{
  std::string name;
  NlevpProblem problem;
  std::optional<std::vector<Complex>> reference;  // eigenvalues, when known
  OracleKind oracle = OracleKind::ClosedForm;
  std::string provenance;
  std::optional<Contour> domain;  // suggested search region
};

// T(z) = diag(z - r_1, .., z - r_k, 1, .., 1). Throws DimensionMismatch if n < k.
GalleryProblem make_diagonal(std::span<const Complex> roots, Index n);

// T(z) = z^2 M2 + z C1 + K0; reference spectrum from the 2n x 2n companion matrix.
// Throws SingularLeading.
GalleryProblem make_quadratic(const DenseMatrix &m2, const DenseMatrix &c1, const DenseMatrix &k0);

// T(z) = -z I + A0 + A1 exp(-tau z). With a region, the reference is the Newton-trace
// oracle restricted to it.
GalleryProblem make_delay(const DenseMatrix &a0, const DenseMatrix &a1, double tau,
                          std::optional<Contour> region = {});

struct OracleResult
{
  std::vector<Complex> roots;
  std::vector<std::string> warnings;  // one per dropped seed
};

// Seeds from local minima of sigma_min(T(z)) on a grid x grid box covering the region,
// refined by z <- z - 1/trace(T(z)^{-1} T'(z)) until the step stagnates below 1e-12.
// Roots within 1e-8 of each other are merged; only roots inside the region are kept.
OracleResult newton_trace_oracle(const NlevpProblem &problem, const Contour &region,
                                 std::size_t grid = 50);

// sigma_min(T(z)) / max(||T(z)||_2, tiny).
double relative_sigma_min(const NlevpProblem &problem, Complex z);

// Deterministic test instances. The quadratic has `inside` eigenvalues of modulus in
// [0.15, 0.35] and the rest of modulus >= 2.5, searched in the unit disk. The delay problem
// has `inside` eigenvalues near modulus 0.2..0.4, the rest at modulus 3..6 with positive real
// part, tau = 1 and a weak delay term, searched in the disk of radius 1.5; its reference
// comes from the Newton-trace oracle and can be skipped.
GalleryProblem standard_quadratic(Index n, Index inside, std::uint64_t seed);
GalleryProblem standard_delay(Index n, Index inside, std::uint64_t seed,
                              bool with_reference = true);

}  // namespace nlevp

#endif  // NLEVP_GALLERY_HPP
