#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rca/errors.hpp"
#include "rca/tensor.hpp"

namespace rca {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct ApproxGDConfig {
  double step_size = 0.0;         // <= 0: derived as 1/(2 * smoothness_H)
  double smoothness_H = 1.0;      // H
  double strong_convexity_mu = 0.0;
  int max_iters = 100;
  double grad_tol = 0.0;          // > 0: stop once the gradient norm drops below
  int poly_degree = 3;
  double radius = 0.0;            // > 0: project iterates onto the L2 ball of this radius

  double step() const { return step_size > 0 ? step_size : 1.0 / (2.0 * smoothness_H); }
  void validate() const {
    if (!(step() > 0)) throw invalid_input("ApproxGDConfig: step size must be positive");
    if (max_iters < 1) throw invalid_input("ApproxGDConfig: max_iters must be at least 1");
  }
};

struct ApproxGDResult {
  Vector theta;
  std::vector<double> grad_norms;  // one entry per evaluated gradient
  int iterations = 0;
};

// Gradient descent with a (possibly inexact) gradient oracle g(theta, iter):
//   theta <- Pi_radius(theta - step * g),
// stopping at max_iters or when the gradient norm falls below grad_tol. With an
// oracle whose error is uniformly bounded by eps on a mu-strongly-convex,
// H-smooth objective and step 1/(2H), iterates contract per step by 1 - mu/(4H)
// until they enter an O(eps/mu) ball and then stay within it, so the final
// squared distance to the minimizer is at most 8 eps^2 / mu^2 plus the
// geometrically decayed initial error.
inline ApproxGDResult approx_gd(const std::function<Vector(const Vector&, int)>& grad,
                                Vector theta0, const ApproxGDConfig& config) {
  config.validate();
  const double step = config.step();
  ApproxGDResult out;
  out.theta = std::move(theta0);
  for (int it = 0; it < config.max_iters; ++it) {
    Vector g = grad(out.theta, it);
    if (!g.allFinite())
      throw convergence_error("approx_gd: non-finite gradient at iteration " + std::to_string(it));
    const double gn = g.norm();
    out.grad_norms.push_back(gn);
    if (config.grad_tol > 0 && gn < config.grad_tol) break;
    out.theta -= step * g;
    if (config.radius > 0) {
      const double norm = out.theta.norm();
      if (norm > config.radius) out.theta *= config.radius / norm;
    }
    ++out.iterations;
  }
  return out;
}

// Chebyshev coefficients c_0..c_degree of f on [-half_width, half_width] via
// Gauss-Chebyshev quadrature; f(x) ~ sum_k c_k T_k(x / half_width) with the
// usual halved c_0.
inline std::vector<double> chebyshev_coeffs(const std::function<double(double)>& f, int degree,
                                            double half_width, int nodes = 513) {
  if (degree < 0) throw invalid_input("chebyshev_coeffs: negative degree");
  if (!(half_width > 0)) throw invalid_input("chebyshev_coeffs: half_width must be positive");
  if (nodes <= degree) throw invalid_input("chebyshev_coeffs: need more nodes than degree");
  const double pi = std::acos(-1.0);
  std::vector<double> fx(nodes), theta(nodes);
  for (int i = 0; i < nodes; ++i) {
    theta[i] = pi * (i + 0.5) / nodes;
    fx[i] = f(half_width * std::cos(theta[i]));
  }
  std::vector<double> c(degree + 1, 0.0);
  for (int k = 0; k <= degree; ++k) {
    double s = 0.0;
    for (int i = 0; i < nodes; ++i) s += fx[i] * std::cos(k * theta[i]);
    c[k] = 2.0 * s / nodes;
  }
  c[0] *= 0.5;
  return c;
}

// Monomial coefficients a_0..a_degree of sum_k c_k T_k(x / half_width), so the
// approximation reads sum_k a_k x^k directly.
inline std::vector<double> chebyshev_to_monomial(const std::vector<double>& c, double half_width) {
  const int degree = static_cast<int>(c.size()) - 1;
  if (degree < 0) throw invalid_input("chebyshev_to_monomial: empty coefficients");
  // T_k recurrence in monomial coordinates of y = x / half_width.
  std::vector<std::vector<double>> t(degree + 1, std::vector<double>(degree + 1, 0.0));
  t[0][0] = 1.0;
  if (degree >= 1) t[1][1] = 1.0;
  for (int k = 2; k <= degree; ++k)
    for (int i = 0; i <= k; ++i) {
      double v = -t[k - 2][i];
      if (i >= 1) v += 2.0 * t[k - 1][i - 1];
      t[k][i] = v;
    }
  std::vector<double> a(degree + 1, 0.0);
  for (int k = 0; k <= degree; ++k)
    for (int i = 0; i <= k; ++i) a[i] += c[k] * t[k][i];
  double scale = 1.0;
  for (int i = 0; i <= degree; ++i) {
    a[i] *= scale;
    scale /= half_width;
  }
  return a;
}

// Monomial coefficients of the Chebyshev fit of the sigmoid on the interval
// [-half_width, half_width]. The default interval [-2, 2] reproduces the
// published degree-3 coefficients (0.5, 0.245, 0, -0.014) within 2e-3. The
// sigmoid minus 1/2 is odd, so even coefficients beyond a_0 = 1/2 vanish up to
// quadrature noise and are pinned exactly; degree 4 therefore coincides with
// degree 3, and degree 5 is the first refinement.
inline std::vector<double> chebyshev_sigmoid(int degree, double half_width = 2.0) {
  if (degree < 3 || degree > 5) throw invalid_input("chebyshev_sigmoid: degree must be 3, 4 or 5");
  auto c = chebyshev_coeffs([](double x) { return sigmoid(x); }, degree, half_width);
  auto a = chebyshev_to_monomial(c, half_width);
  a[0] = 0.5;
  for (std::size_t i = 2; i < a.size(); i += 2) a[i] = 0.0;
  return a;
}

}  // namespace rca
