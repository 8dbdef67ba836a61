// SPDX-License-Identifier: Apache-2.0

#ifndef NLEVP_CONTOUR_HPP
#define NLEVP_CONTOUR_HPP

#include <cstddef>
#include <span>
#include <variant>
#include <vector>
#include "nlevp/linalg.hpp"

namespace nlevp
{

struct Circle
{
  Complex center = 0.0;
  double radius = 1.0;

  bool operator==(const Circle &) const = default;
};

// z(theta) = center + rx*cos(theta) + i*ry*sin(theta); rx is the semi-axis along the real
// direction.
struct Ellipse
{
  Complex center = 0.0;
  double rx = 1.0;
  double ry = 1.0;

  bool operator==(const Ellipse &) const = default;
};

struct Interval
{
  double a = -1.0;
  double b = 1.0;

  double midpoint() const { return 0.5 * (a + b); }
  double halfwidth() const { return 0.5 * (b - a); }

  // Affine map onto [-1, 1] and back, extended to complex arguments.
  Complex to_scaled(Complex z) const { return (2.0 * z - a - b) / (b - a); }
  Complex from_scaled(Complex s) const { return midpoint() + halfwidth() * s; }

  bool operator==(const Interval &) const = default;
};

using Contour = std::variant<Circle, Ellipse, Interval>;

// Throws InvalidContour for nonpositive radii or an empty interval.
void validate(const Contour &contour);

Complex center_of(const Contour &contour);

// Characteristic length: radius, larger semi-axis, or half-width.
double scale_of(const Contour &contour);

// Point-in test. For intervals the region is the closed segment thickened by a band of
// 1e-8 * halfwidth in the imaginary direction.
bool contains(const Contour &contour, Complex z);

// Closest distance from z to the curve (or segment).
double distance_to_boundary(const Contour &contour, Complex z);

enum class QuadratureRule
{
  Trapezoid,
  GaussLegendre
};

// m+1 nodes sigma_0..sigma_m with weights chosen so that sum_j w_j/(z - sigma_j)
// approximates 1 for z inside the curve.
struct Quadrature
{
  std::vector<Complex> nodes;
  std::vector<Complex> weights;
  Contour contour;

  std::size_t order() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

Quadrature trapezoid_rule(const Contour &contour, std::size_t m);
Quadrature gauss_legendre_rule(const Contour &contour, std::size_t m);
Quadrature make_quadrature(QuadratureRule rule, const Contour &contour, std::size_t m);

struct LegendreRule
{
  std::vector<double> nodes;  // ascending in [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with `count` points on [-1, 1] (Newton iteration to 1e-15).
LegendreRule gauss_legendre_nodes(std::size_t count);

// First-kind points midpoint + halfwidth*cos(pi*(k + 1/2)/(m+1)), k = 0..m.
std::vector<double> chebyshev_points(const Interval &interval, std::size_t m);

// tau_i(z) = T_i(s(z)) by the three-term recurrence.
Complex cheb_basis_eval(const Interval &interval, std::size_t i, Complex z);

// tau_0(z), .., tau_{out.size()-1}(z).
void cheb_basis_values(const Interval &interval, Complex z, std::span<Complex> out);

}  // namespace nlevp

#endif  // NLEVP_CONTOUR_HPP
