// SPDX-License-Identifier: Apache-2.0

#include "nlevp/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include "nlevp/errors.hpp"

namespace nlevp
{

namespace
{

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

constexpr double kPi = std::numbers::pi;

}  // namespace

void validate(const Contour &contour)
{
  std::visit(overloaded{[](const Circle &c) {
                          if (!(c.radius > 0.0) || !std::isfinite(c.radius))
                          {
                            throw Error(ErrorCode::InvalidContour, "circle radius must be positive");
                          }
                        },
                        [](const Ellipse &e) {
                          if (!(e.rx > 0.0) || !(e.ry > 0.0) || !std::isfinite(e.rx) ||
                              !std::isfinite(e.ry))
                          {
                            throw Error(ErrorCode::InvalidContour,
                                        "ellipse semi-axes must be positive");
                          }
                        },
                        [](const Interval &i) {
                          if (!(i.a < i.b) || !std::isfinite(i.a) || !std::isfinite(i.b))
                          {
                            throw Error(ErrorCode::InvalidContour, "interval requires a < b");
                          }
                        }},
             contour);
}

Complex center_of(const Contour &contour)
{
  return std::visit(overloaded{[](const Circle &c) { return c.center; },
                               [](const Ellipse &e) { return e.center; },
                               [](const Interval &i) { return Complex(i.midpoint()); }},
                    contour);
}

double scale_of(const Contour &contour)
{
  return std::visit(overloaded{[](const Circle &c) { return c.radius; },
                               [](const Ellipse &e) { return std::max(e.rx, e.ry); },
                               [](const Interval &i) { return i.halfwidth(); }},
                    contour);
}

bool contains(const Contour &contour, Complex z)
{
  return std::visit(
      overloaded{[z](const Circle &c) { return std::abs(z - c.center) < c.radius; },
                 [z](const Ellipse &e) {
                   const Complex d = z - e.center;
                   const double x = d.real() / e.rx;
                   const double y = d.imag() / e.ry;
                   return x * x + y * y < 1.0;
                 },
                 [z](const Interval &i) {
                   const double band = 1e-8 * i.halfwidth();
                   return z.real() >= i.a - band && z.real() <= i.b + band &&
                          std::abs(z.imag()) <= band;
                 }},
      contour);
}

double distance_to_boundary(const Contour &contour, Complex z)
{
  return std::visit(overloaded{[z](const Circle &c) {
                                 return std::abs(std::abs(z - c.center) - c.radius);
                               },
                               [z](const Ellipse &e) {
                                 // Dense sampling of the parametrization; plenty for the
                                 // diagnostic uses of this function.
                                 constexpr int samples = 4096;
                                 double best = std::numeric_limits<double>::infinity();
                                 for (int j = 0; j < samples; ++j)
                                 {
                                   const double t = 2.0 * kPi * j / samples;
                                   const Complex p =
                                       e.center + Complex(e.rx * std::cos(t), e.ry * std::sin(t));
                                   best = std::min(best, std::abs(z - p));
                                 }
                                 return best;
                               },
                               [z](const Interval &i) {
                                 const double x = std::clamp(z.real(), i.a, i.b);
                                 return std::abs(z - Complex(x));
                               }},
                    contour);
}

namespace
{

// Parametrization z(theta) and z'(theta) on [0, 2*pi).
struct CurvePoint
{
  Complex z;
  Complex dz;
};

CurvePoint curve_point(const Contour &contour, double theta)
{
  return std::visit(
      overloaded{[theta](const Circle &c) {
                   const Complex e = std::polar(1.0, theta);
                   return CurvePoint{c.center + c.radius * e, 1i * c.radius * e};
                 },
                 [theta](const Ellipse &e) {
                   const double ct = std::cos(theta);
                   const double st = std::sin(theta);
                   return CurvePoint{e.center + Complex(e.rx * ct, e.ry * st),
                                     Complex(-e.rx * st, e.ry * ct)};
                 },
                 [](const Interval &) -> CurvePoint {
                   throw Error(ErrorCode::InvalidContour,
                               "quadrature rules need a closed curve, not an interval");
                 }},
      contour);
}

void check_closed_curve(const Contour &contour, std::size_t m)
{
  if (std::holds_alternative<Interval>(contour))
  {
    throw Error(ErrorCode::InvalidContour,
                "quadrature rules need a closed curve, not an interval");
  }
  validate(contour);
  if (m < 2)
  {
    throw Error(ErrorCode::InvalidOrder, "quadrature order must be at least 2");
  }
}

}  // namespace

Quadrature trapezoid_rule(const Contour &contour, std::size_t m)
{
  check_closed_curve(contour, m);
  const std::size_t count = m + 1;
  const double dtheta = 2.0 * kPi / static_cast<double>(count);
  Quadrature quad{{}, {}, contour};
  quad.nodes.reserve(count);
  quad.weights.reserve(count);
  for (std::size_t j = 0; j < count; ++j)
  {
    const CurvePoint p = curve_point(contour, dtheta * static_cast<double>(j));
    quad.nodes.push_back(p.z);
    // Sign fixed by the 1/(z - sigma) partial-fraction form.
    quad.weights.push_back(-p.dz * dtheta / (2.0 * kPi * 1i));
  }
  return quad;
}

LegendreRule gauss_legendre_nodes(std::size_t count)
{
  LegendreRule rule{std::vector<double>(count), std::vector<double>(count)};
  const auto n = static_cast<double>(count);
  for (std::size_t i = 0; i < (count + 1) / 2; ++i)
  {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it)
    {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= count; ++k)
      {
        const auto kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15)
      {
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[count - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[count - 1 - i] = w;
  }
  return rule;
}

Quadrature gauss_legendre_rule(const Contour &contour, std::size_t m)
{
  check_closed_curve(contour, m);
  const std::size_t count = m + 1;
  const LegendreRule rule = gauss_legendre_nodes(count);
  Quadrature quad{{}, {}, contour};
  quad.nodes.reserve(count);
  quad.weights.reserve(count);
  for (std::size_t j = 0; j < count; ++j)
  {
    const double theta = kPi * (rule.nodes[j] + 1.0);
    const CurvePoint p = curve_point(contour, theta);
    quad.nodes.push_back(p.z);
    quad.weights.push_back(-p.dz * (kPi * rule.weights[j]) / (2.0 * kPi * 1i));
  }
  return quad;
}

Quadrature make_quadrature(QuadratureRule rule, const Contour &contour, std::size_t m)
{
  return rule == QuadratureRule::Trapezoid ? trapezoid_rule(contour, m)
                                           : gauss_legendre_rule(contour, m);
}

std::vector<double> chebyshev_points(const Interval &interval, std::size_t m)
{
  validate(interval);
  if (m < 1)
  {
    throw Error(ErrorCode::InvalidOrder, "Chebyshev order must be at least 1");
  }
  std::vector<double> x(m + 1);
  const auto count = static_cast<double>(m + 1);
  for (std::size_t k = 0; k <= m; ++k)
  {
    x[k] = interval.midpoint() +
           interval.halfwidth() * std::cos(kPi * (static_cast<double>(k) + 0.5) / count);
  }
  return x;
}

void cheb_basis_values(const Interval &interval, Complex z, std::span<Complex> out)
{
  if (out.empty())
  {
    return;
  }
  const Complex s = interval.to_scaled(z);
  out[0] = 1.0;
  if (out.size() > 1)
  {
    out[1] = s;
  }
  for (std::size_t i = 2; i < out.size(); ++i)
  {
    out[i] = 2.0 * s * out[i - 1] - out[i - 2];
  }
}

Complex cheb_basis_eval(const Interval &interval, std::size_t i, Complex z)
{
  const Complex s = interval.to_scaled(z);
  Complex prev = 1.0;
  if (i == 0)
  {
    return prev;
  }
  Complex cur = s;
  for (std::size_t k = 1; k < i; ++k)
  {
    const Complex next = 2.0 * s * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace nlevp
