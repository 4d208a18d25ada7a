#pragma once

#include <utility>
#include <vector>

#include "rca/cumulants.hpp"
#include "rca/tensor.hpp"

namespace rca {

// Relative singular-value threshold below which the map-recovery unfolding is
// treated as rank deficient (the perturbing component has no usable cumulant).
inline constexpr double kDegenerateTol = 1e-6;

// Moore-Penrose pseudoinverse; singular values below rank_tol * sigma_max are
// treated as zero.
inline Matrix pinv(const Matrix& m, double rank_tol = 1e-10) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double thresh = rank_tol * (s.size() > 0 ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > thresh) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

struct ConditioningReport {
  double sigma4 = 0;       // smallest singular value of the first unfolded cross-cumulant
  double sigma_A = 0;      // smallest singular value of the recovered map
  double spectral_A = 0;   // largest singular value of the recovered map
  double radius_bound = 0; // sigma4 / 2: admissible unfolding perturbation before the
                           // least-squares rank decision can flip (Weyl)
  int n_samples = 0;
};

// Solve for the map given the two unfolded cross-cumulants: A^T in least squares
// from M X = N where M = unfold(kappa(V,U,...,U)) and N = unfold(kappa(V,U,...,V)).
inline Matrix estimate_A_from_cumulants(const DenseTensor& k_vu_u, const DenseTensor& k_vu_v,
                                        double rank_tol = 1e-10,
                                        ConditioningReport* report = nullptr) {
  const Matrix m = unfold(k_vu_u);
  const Matrix n = unfold(k_vu_v);
  if (m.rows() != n.rows()) throw invalid_input("estimate_A: unfolding shapes disagree");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double sigma_last = s(s.size() - 1);
  const double frob = m.norm();
  // Vanishing smallest singular value relative to the unfolding scale means the
  // perturbing component has (numerically) zero cumulant at this order.
  if (!(sigma_last > kDegenerateTol * frob))
    throw degenerate_error("estimate_A: unfolded cumulant is rank deficient; the perturbing component's cumulant vanishes at this order");
  const double thresh = rank_tol * s(0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > thresh) inv(i) = 1.0 / s(i);
  Matrix a_t = svd.matrixV() * inv.asDiagonal() * (svd.matrixU().transpose() * n);
  Matrix a = a_t.transpose();
  if (report) {
    report->sigma4 = sigma_last;
    report->radius_bound = sigma_last / 2.0;
    Eigen::JacobiSVD<Matrix> asvd(a);
    report->spectral_A = asvd.singularValues()(0);
    report->sigma_A = asvd.singularValues()(asvd.singularValues().size() - 1);
  }
  return a;
}

// Recover the unknown map from the two views U = S1 + S2, V = A S2 + S3 using
// fourth-order cross-cumulants (third-order variant for skewed S2 via order = 3):
//   A^T = pinv(unfold(kappa(V,U,..,U))) unfold(kappa(V,U,..,V)).
// Requires dim(V) >= dim(U); equivariant under V -> MV.
inline std::pair<Matrix, ConditioningReport> estimate_A(const Matrix& u, const Matrix& v,
                                                        double rank_tol = 1e-10, int order = 4) {
  if (order != 3 && order != 4) throw invalid_input("estimate_A: order must be 3 or 4");
  if (u.rows() != v.rows()) throw invalid_input("estimate_A: sample counts differ");
  if (v.cols() < u.cols())
    throw invalid_input("estimate_A: V must have at least as many coordinates as U");
  if (u.rows() < order + 1) throw invalid_input("estimate_A: not enough samples");
  Matrix uc = centered(u);
  Matrix vc = centered(v);
  BlockMomentCache cache({&uc, &vc});  // labels: 0 = U, 1 = V
  std::vector<int> slots_u(order, 0), slots_v(order, 0);
  slots_u[0] = 1;            // (V, U, ..., U)
  slots_v[0] = 1;
  slots_v[order - 1] = 1;    // (V, U, ..., V)
  DenseTensor k_vu_u = cross_cumulant_centered(cache, slots_u);
  DenseTensor k_vu_v = cross_cumulant_centered(cache, slots_v);
  ConditioningReport report;
  Matrix a = estimate_A_from_cumulants(k_vu_u, k_vu_v, rank_tol, &report);
  report.n_samples = static_cast<int>(u.rows());
  return {std::move(a), report};
}

// Average of the mixed-pattern cumulants over every surjective slot assignment
// [t] -> pool. For a two-matrix pool this equals the sum identity
//   [kappa_t(U + W) - kappa_t(U) - kappa_t(W)] / (2^t - 2)
// expanded by multilinearity: both are the same polynomial in the data, so the two
// computation paths agree to rounding error on identical samples. Pool matrices
// must be centered and share both n and d.
inline DenseTensor pattern_averaged_cumulant(BlockMomentCache& cache, int pool_size, int t) {
  if (pool_size < 2) throw invalid_input("pattern_averaged_cumulant: pool too small");
  const int d = static_cast<int>(cache.view(0).cols());
  for (int p = 1; p < pool_size; ++p)
    if (cache.view(p).cols() != d)
      throw invalid_input("pattern_averaged_cumulant: pool dimensions differ");
  DenseTensor acc = DenseTensor::cube(t, d);
  std::vector<int> slots(t, 0);
  int count = 0;
  const std::size_t total = [&] {
    std::size_t p = 1;
    for (int i = 0; i < t; ++i) p *= pool_size;
    return p;
  }();
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    unsigned seen = 0;
    for (int m = 0; m < t; ++m) {
      slots[m] = static_cast<int>(c % pool_size);
      seen |= 1u << slots[m];
      c /= pool_size;
    }
    if (seen != (1u << pool_size) - 1u) continue;  // not surjective
    acc += cross_cumulant_centered(cache, slots);
    ++count;
  }
  if (count == 0) throw invalid_input("pattern_averaged_cumulant: order below pool size");
  acc *= 1.0 / count;
  return acc;
}

inline DenseTensor pattern_averaged_cumulant(const Matrix& x_centered, const Matrix& y_centered,
                                             int t) {
  if (x_centered.cols() != y_centered.cols())
    throw invalid_input("pattern_averaged_cumulant: dimensions differ");
  BlockMomentCache cache({&x_centered, &y_centered});
  return pattern_averaged_cumulant(cache, 2, t);
}

// The same estimator through the sum identity; exposed for the path-equivalence
// checks. kappa_t(S2) = [kappa_t(U + W) - kappa_t(U) - kappa_t(W)] / (2^t - 2).
inline DenseTensor extract_s2_sum_identity(const Matrix& u, const Matrix& v, const Matrix& a,
                                           int t, double rank_tol = 1e-10) {
  Matrix uc = centered(u);
  Matrix w = centered(v) * pinv(a, rank_tol).transpose();
  Matrix sum = uc + w;
  DenseTensor out = auto_cumulant(sum, t);
  out -= auto_cumulant(uc, t);
  out -= auto_cumulant(w, t);
  out *= 1.0 / (std::pow(2.0, t) - 2.0);
  return out;
}

inline DenseTensor extract_s2_pattern_average(const Matrix& u, const Matrix& v, const Matrix& a,
                                              int t, double rank_tol = 1e-10) {
  Matrix uc = centered(u);
  Matrix w = centered(v) * pinv(a, rank_tol).transpose();
  return pattern_averaged_cumulant(uc, w, t);
}

// Per-component cumulants of orders 2..t_max.
struct ComponentCumulants {
  int t_max = 0;
  std::vector<DenseTensor> s1, s2, s3;  // [i] holds order i + 2

  const DenseTensor& of(int component, int order) const {
    if (order < 2 || order > t_max) throw invalid_input("ComponentCumulants: order out of range");
    const auto& v = component == 1 ? s1 : component == 2 ? s2 : s3;
    return v[order - 2];
  }
};

// Recover the cumulants of all three latent components from the two views given
// the map: W = pinv(A) V shares S2 with U, so
//   kappa_t(S2) = pattern average over mixed (U, W) cumulants,
//   kappa_t(S1) = kappa_t(U) - kappa_t(S2),
//   kappa_t(S3) = kappa_t(V) - pattern average over mixed (A U, V) cumulants.
// Both views are centered empirically. A must have full column rank at rank_tol.
inline ComponentCumulants extract_cumulants(const Matrix& u, const Matrix& v, const Matrix& a,
                                            int t_max = 4, double rank_tol = 1e-10) {
  if (t_max < 2 || t_max > kMaxCumulantOrder)
    throw invalid_input("extract_cumulants: t_max must be in 2..6");
  if (u.rows() != v.rows()) throw invalid_input("extract_cumulants: sample counts differ");
  if (a.rows() != v.cols() || a.cols() != u.cols())
    throw invalid_input("extract_cumulants: map shape does not match the views");
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > rank_tol * s(0)))
    throw degenerate_error("extract_cumulants: A is rank deficient at rank_tol");

  Matrix uc = centered(u);
  Matrix vc = centered(v);
  Matrix w = vc * pinv(a, rank_tol).transpose();
  Matrix au = uc * a.transpose();

  ComponentCumulants out;
  out.t_max = t_max;
  BlockMomentCache uw({&uc, &w});
  BlockMomentCache av({&au, &vc});
  for (int t = 2; t <= t_max; ++t) {
    DenseTensor s2 = pattern_averaged_cumulant(uw, 2, t);
    DenseTensor s1 = cross_cumulant_centered(uw, std::vector<int>(t, 0));
    s1 -= s2;
    DenseTensor s3 = cross_cumulant_centered(av, std::vector<int>(t, 1));
    s3 -= pattern_averaged_cumulant(av, 2, t);
    out.s2.push_back(std::move(s2));
    out.s1.push_back(std::move(s1));
    out.s3.push_back(std::move(s3));
  }
  return out;
}

}  // namespace rca
