#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rca/contrastive.hpp"
#include "rca/cumulants.hpp"
#include "rca/gradient.hpp"
#include "rca/random.hpp"

namespace rca {

// Squared distance between unit directions, invariant to the overall sign.
inline double aligned_squared_distance(const Vector& v, const Vector& w) {
  if (v.size() != w.size()) throw invalid_input("aligned_squared_distance: size mismatch");
  return std::min((v - w).squaredNorm(), (v + w).squaredNorm());
}

struct PcaResult {
  Vector top_eigenvector;  // unit norm, first nonzero coordinate positive
  double eigenvalue = 0.0;
  double eigengap = 0.0;   // top minus second eigenvalue
  bool identifiable = true;  // false when the eigengap is below 1e-8
};

// Top eigenvector of the symmetrized second cumulant. An eigengap below 1e-8
// means the direction is not identified; the result is flagged, not rejected.
inline PcaResult contrastive_pca(const Matrix& k2_s1) {
  if (k2_s1.rows() != k2_s1.cols()) throw invalid_input("contrastive_pca: matrix must be square");
  if (!k2_s1.allFinite()) throw degenerate_error("contrastive_pca: non-finite entries");
  const Matrix sym = 0.5 * (k2_s1 + k2_s1.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Eigen::Index d = sym.rows();
  PcaResult out;
  out.top_eigenvector = es.eigenvectors().col(d - 1);
  out.eigenvalue = es.eigenvalues()(d - 1);
  out.eigengap = d > 1 ? es.eigenvalues()(d - 1) - es.eigenvalues()(d - 2)
                       : std::numeric_limits<double>::infinity();
  out.identifiable = out.eigengap >= 1e-8;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(out.top_eigenvector(i)) > 1e-12) {
      if (out.top_eigenvector(i) < 0) out.top_eigenvector = -out.top_eigenvector;
      break;
    }
  }
  return out;
}

struct RegressionResult {
  Vector beta;
};

// beta = pinv(M2) E[YX]; under the zero-mean convention the second moment is the
// second cumulant. The moment matrix must be invertible at rank_tol.
inline RegressionResult contrastive_lsr(const Matrix& k2_s1, const Vector& xy_moment,
                                        double rank_tol = 1e-10) {
  if (k2_s1.rows() != k2_s1.cols()) throw invalid_input("contrastive_lsr: matrix must be square");
  if (xy_moment.size() != k2_s1.rows())
    throw invalid_input("contrastive_lsr: moment vector size mismatch");
  const Matrix sym = 0.5 * (k2_s1 + k2_s1.transpose());
  Eigen::JacobiSVD<Matrix> svd(sym);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > rank_tol * s(0)))
    throw degenerate_error("contrastive_lsr: singular moment matrix");
  return RegressionResult{pinv(sym, rank_tol) * xy_moment};
}

// ---------------------------------------------------------------------------
// Spherical GMM via rank-k CP decomposition of the third-moment tensor.

struct CpAls3Options {
  int iters = 200;
  int restarts = 10;
  double tol = 1e-8;  // convergence: relative residual change below this
  std::uint64_t seed = 0;
};

struct CpAls3Result {
  Vector lambda;   // component weights, factor columns unit norm
  Matrix factors;  // d x k, the mode-1 factor after sign alignment
  double residual = 0.0;  // relative Frobenius residual of the best restart
  bool converged = false;
};

namespace detail {

inline Matrix mode_unfold3(const DenseTensor& t, int mode) {
  const int d = t.dims()[0];
  Matrix out(d, static_cast<Eigen::Index>(d) * d);
  std::vector<int> idx(3);
  const int o1 = mode == 0 ? 1 : 0;
  const int o2 = mode == 2 ? 1 : 2;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        idx[mode] = a;
        idx[o1] = b;
        idx[o2] = c;
        out(a, static_cast<Eigen::Index>(b) * d + c) = t.at(idx);
      }
  return out;
}

}  // namespace detail

// Alternating least squares CP decomposition of an order-3 cube,
// T ~ sum_r lambda_r f0_r (x) f1_r (x) f2_r. Factors are kept separate during
// the sweeps (more robust than enforcing symmetry) and sign-aligned to mode 1
// at the end, so on a symmetric input the returned factors estimate its
// symmetric components. Throws a convergence error when no restart converges.
inline CpAls3Result cp_als3(const DenseTensor& t, int k, const CpAls3Options& opts = {}) {
  if (t.order() != 3) throw invalid_input("cp_als3: tensor order must be 3");
  const int d = t.dims()[0];
  if (k < 1 || k > d) throw invalid_input("cp_als3: rank must be in 1..d");
  if (opts.iters < 1 || opts.restarts < 1) throw invalid_input("cp_als3: bad iteration counts");

  const Matrix unf[3] = {detail::mode_unfold3(t, 0), detail::mode_unfold3(t, 1),
                         detail::mode_unfold3(t, 2)};
  const double t_norm = std::max(t.norm(), 1e-300);

  CpAls3Result best;
  double best_res = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  Rng rng(opts.seed);

  for (int restart = 0; restart < opts.restarts; ++restart) {
    Rng r = rng.fork(static_cast<std::uint64_t>(restart));
    Matrix f[3];
    for (auto& m : f) {
      m = Matrix(d, k);
      for (int j = 0; j < k; ++j) {
        for (int i = 0; i < d; ++i) m(i, j) = r.normal();
        m.col(j).normalize();
      }
    }
    Vector lam = Vector::Ones(k);
    double prev = std::numeric_limits<double>::infinity();
    double res = prev;
    bool converged = false;
    for (int it = 0; it < opts.iters; ++it) {
      for (int m = 0; m < 3; ++m) {
        const int o1 = m == 0 ? 1 : 0;
        const int o2 = m == 2 ? 1 : 2;
        Matrix kr(static_cast<Eigen::Index>(d) * d, k);
        for (int rr = 0; rr < k; ++rr)
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
              kr(static_cast<Eigen::Index>(i) * d + j, rr) = f[o1](i, rr) * f[o2](j, rr);
        const Matrix g =
            (f[o1].transpose() * f[o1]).cwiseProduct(f[o2].transpose() * f[o2]);
        Matrix fm = unf[m] * kr * pinv(g);
        for (int rr = 0; rr < k; ++rr) {
          lam(rr) = fm.col(rr).norm();
          if (lam(rr) == 0) lam(rr) = 1e-300;
          f[m].col(rr) = fm.col(rr) / lam(rr);
        }
      }
      // relative residual; explicit reconstruction is negligible at target sizes
      DenseTensor recon = DenseTensor::cube(3, d);
      std::vector<int> idx(3);
      for (int rr = 0; rr < k; ++rr)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            for (int l = 0; l < d; ++l) {
              idx[0] = i;
              idx[1] = j;
              idx[2] = l;
              recon.at(idx) += lam(rr) * f[0](i, rr) * f[1](j, rr) * f[2](l, rr);
            }
      recon -= t;
      res = recon.norm() / t_norm;
      if (std::abs(prev - res) < opts.tol) {
        converged = true;
        break;
      }
      prev = res;
    }
    any_converged |= converged;
    if (res < best_res) {
      best_res = res;
      // sign-align modes 2 and 3 to mode 1; each flip carries into lambda
      Vector lam_al = lam;
      Matrix f0 = f[0];
      for (int rr = 0; rr < k; ++rr) {
        if (f[0].col(rr).dot(f[1].col(rr)) < 0) lam_al(rr) = -lam_al(rr);
        if (f[0].col(rr).dot(f[2].col(rr)) < 0) lam_al(rr) = -lam_al(rr);
      }
      best = CpAls3Result{lam_al, f0, res, converged};
    }
  }
  if (!any_converged)
    throw convergence_error("cp_als3: no restart converged; best residual " +
                            std::to_string(best_res));
  return best;
}

struct GmmOptions {
  int ls_iters = 200;
  int restarts = 10;
  double tol = 1e-8;
  std::uint64_t seed = 0;
};

struct GmmResult {
  Matrix centers;  // k x d, one center per row
  Vector weights;  // uniform 1/k
  double sigma2 = 0.0;
  double residual = 0.0;
};

// Spherical mixture of k equal-weight Gaussians from the order-2 and order-3
// cumulants of the signal: the spherical noise estimate is the smallest
// covariance eigenvalue, the debiased third-moment tensor is
//   M3 = kappa_3 - sigma^2 * sum_i (m (x) e_i (x) e_i + perms)
// (the correction vanishes under the zero-mean convention m = 0), and equals
// sum_r w mu_r^{(x)3}; a rank-k CP fit then yields mu_r = (lambda_r / w)^{1/3} a_r.
inline GmmResult contrastive_gmm(const Matrix& k2_s1, const DenseTensor& k3_s1, int k,
                                 const GmmOptions& opts = {}, const Vector* mean = nullptr) {
  if (k3_s1.order() != 3) throw invalid_input("contrastive_gmm: third cumulant must be order 3");
  const int d = static_cast<int>(k2_s1.rows());
  if (k2_s1.cols() != d || k3_s1.dims()[0] != d)
    throw invalid_input("contrastive_gmm: dimension mismatch");
  const Matrix sym = 0.5 * (k2_s1 + k2_s1.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const double sigma2 = std::max(es.eigenvalues()(0), 0.0);

  DenseTensor t = k3_s1;
  if (mean) {
    if (mean->size() != d) throw invalid_input("contrastive_gmm: mean size mismatch");
    std::vector<int> idx(3);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        idx[0] = i, idx[1] = j, idx[2] = j;
        t.at(idx) -= sigma2 * (*mean)(i);
        idx[0] = j, idx[1] = i, idx[2] = j;
        t.at(idx) -= sigma2 * (*mean)(i);
        idx[0] = j, idx[1] = j, idx[2] = i;
        t.at(idx) -= sigma2 * (*mean)(i);
      }
  }

  CpAls3Result fit = cp_als3(t, k, CpAls3Options{opts.ls_iters, opts.restarts, opts.tol, opts.seed});
  GmmResult out;
  out.centers = Matrix(k, d);
  for (int r = 0; r < k; ++r)
    out.centers.row(r) = std::cbrt(fit.lambda(r) * k) * fit.factors.col(r).transpose();
  out.weights = Vector::Constant(k, 1.0 / k);
  out.sigma2 = sigma2;
  out.residual = fit.residual;
  return out;
}

// Mean squared center distance under the best bijective matching (bitmask DP).
inline double matched_centers_mse(const Matrix& est, const Matrix& truth) {
  const int k = static_cast<int>(truth.rows());
  if (est.rows() != k || est.cols() != truth.cols())
    throw invalid_input("matched_centers_mse: shape mismatch");
  if (k > 16) throw invalid_input("matched_centers_mse: at most 16 centers supported");
  Matrix cost(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) cost(i, j) = (est.row(i) - truth.row(j)).squaredNorm();
  const int full = (1 << k) - 1;
  std::vector<double> f(full + 1, std::numeric_limits<double>::infinity());
  f[0] = 0.0;
  for (int mask = 0; mask < full; ++mask) {
    if (!std::isfinite(f[mask])) continue;
    const int i = __builtin_popcount(static_cast<unsigned>(mask));
    for (int j = 0; j < k; ++j) {
      if (mask & (1 << j)) continue;
      const int nm = mask | (1 << j);
      f[nm] = std::min(f[nm], f[mask] + cost(i, j));
    }
  }
  return f[full] / k;
}

// ---------------------------------------------------------------------------
// Logistic regression.

// Full-likelihood Newton MLE on raw samples (no intercept); the baseline
// learner for arms that have samples rather than cumulants.
inline Vector newton_logistic(const Matrix& x, const Vector& y, int iters = 30,
                              double ridge = 1e-9) {
  const Eigen::Index n = x.rows(), d = x.cols();
  if (y.size() != n) throw invalid_input("newton_logistic: label count mismatch");
  Vector beta = Vector::Zero(d);
  for (int it = 0; it < iters; ++it) {
    Vector p = (x * beta).unaryExpr([](double z) { return sigmoid(z); });
    Vector g = x.transpose() * (y - p) / static_cast<double>(n);
    if (g.norm() < 1e-10) break;
    Vector w = p.array() * (1.0 - p.array());
    Matrix h = x.transpose() * w.asDiagonal() * x / static_cast<double>(n) +
               ridge * Matrix::Identity(d, d);
    beta += h.ldlt().solve(g);
  }
  return beta;
}

struct PolyLogisticResult {
  Vector beta;
  std::vector<double> grad_norms;
  std::vector<double> coeffs;  // monomial sigmoid coefficients used
};

// Maximize the polynomial-approximated logistic likelihood by ascent on
//   g(theta) = E[YX] - a1 M2 theta - a3 M4(., theta, theta, theta) [- a5 M6(...)],
// where the moment tensors are reconstructed from cumulants (zero-mean
// convention, so the a0 E[X] term vanishes). The cubic term makes the surrogate
// unbounded far from the origin, so iterates are projected onto a ball; the
// default step is 1/(2H) with H = lambda_max(M2)/4, the logistic smoothness
// bound.
inline PolyLogisticResult poly_logistic_from_moments(const Matrix& m2, const DenseTensor& m4,
                                                     const DenseTensor* m6,
                                                     const Vector& xy_moment,
                                                     ApproxGDConfig config = {}) {
  const int d = static_cast<int>(m2.rows());
  if (m2.cols() != d || m4.order() != 4 || m4.dims()[0] != d || xy_moment.size() != d)
    throw invalid_input("poly_logistic_from_moments: shape mismatch");
  if (config.poly_degree == 5 && !m6)
    throw invalid_input("poly_logistic_from_moments: degree 5 needs the sixth moment");
  const std::vector<double> a = chebyshev_sigmoid(config.poly_degree);
  const double a1 = a[1];
  const double a3 = a[3];
  const double a5 = config.poly_degree == 5 ? a[5] : 0.0;

  const Matrix m2s = 0.5 * (m2 + m2.transpose());
  if (config.step_size <= 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m2s);
    config.smoothness_H = std::max(es.eigenvalues()(d - 1) / 4.0, 1e-9);
  }

  auto ascent = [&](const Vector& theta, int) {
    Vector g = xy_moment - a1 * (m2s * theta);
    g -= a3 * as_vector(contract_modes(m4, {1, 2, 3}, theta));
    if (a5 != 0.0) g -= a5 * as_vector(contract_modes(*m6, {1, 2, 3, 4, 5}, theta));
    return Vector(-g);  // approx_gd minimizes
  };
  ApproxGDResult res = approx_gd(ascent, Vector::Zero(d), config);
  return PolyLogisticResult{std::move(res.theta), std::move(res.grad_norms), a};
}

// Chebyshev-approximated logistic fit from the extracted signal cumulants and
// the label cross-moment E[YX] (labels are independent of the perturbation, so
// the raw-view cross-moment estimates it directly).
inline PolyLogisticResult contrastive_logistic(const Matrix& u, const Vector& y,
                                               const ComponentCumulants& extraction,
                                               ApproxGDConfig config = {}) {
  const Eigen::Index n = u.rows();
  if (y.size() != n) throw invalid_input("contrastive_logistic: label count mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (y(i) != 0.0 && y(i) != 1.0)
      throw invalid_input("contrastive_logistic: labels must be 0 or 1");
  if (config.radius <= 0) config.radius = 1.1;

  const Vector exy = centered(u).transpose() * y / static_cast<double>(n);
  const Matrix k2 = as_matrix(extraction.of(1, 2));
  const DenseTensor m4 = fourth_moment_from_cumulants(extraction.of(1, 4), k2);
  if (config.poly_degree == 5) {
    auto lookup = [&](int order) -> const DenseTensor& { return extraction.of(1, order); };
    const DenseTensor m6 = moment_from_cumulants(6, lookup);
    return poly_logistic_from_moments(k2, m4, &m6, exy, config);
  }
  return poly_logistic_from_moments(k2, m4, nullptr, exy, config);
}

}  // namespace rca
