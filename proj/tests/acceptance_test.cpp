// Acceptance gate: exercises the ten pinned correctness criteria end to end and
// prints one [PASS]/[FAIL] line per criterion with measured margins. Exits
// nonzero if any criterion fails. Tolerances are pinned in code on purpose.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rca/rca.hpp"

using rca::DenseTensor;
using rca::Matrix;
using rca::Rng;
using rca::Setting;
using rca::Vector;

namespace {

int g_failures = 0;

void verdict(int criterion, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void note(const std::string& line) {
  std::printf("       %s\n", line.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  char b[64];
  std::snprintf(b, sizeof b, "%.4g", x);
  return b;
}

Matrix random_invertible(Rng& rng, int rows, int cols, double min_sv) {
  for (int tries = 0; tries < 100000; ++tries) {
    Matrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    Eigen::JacobiSVD<Matrix> svd(a);
    if (svd.singularValues()(svd.singularValues().size() - 1) >= min_sv) return a;
  }
  throw std::runtime_error("random_invertible: rejection sampling exhausted");
}

// kappa_t of S = B e with e iid, all order-t auto-cumulants equal to c:
// kappa[i1..it] = c * sum_m prod_s B(is, m).
DenseTensor mixed_iid_cumulant(const Matrix& b, int t, double c) {
  const int d = static_cast<int>(b.rows());
  DenseTensor out = DenseTensor::cube(t, d);
  std::vector<int> idx(t, 0);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::size_t rem = flat;
    for (int m = t - 1; m >= 0; --m) {
      idx[m] = static_cast<int>(rem % d);
      rem /= d;
    }
    double s = 0;
    for (int m = 0; m < b.cols(); ++m) {
      double p = c;
      for (int u = 0; u < t; ++u) p *= b(idx[u], m);
      s += p;
    }
    out[flat] = s;
  }
  return out;
}

// Fourth-order cross tensors of the two-view model for S2 = B e, e iid with
// kappa4 = c: slots (V,U,U,U) and (V,U,U,V).
DenseTensor k4_vuuu(const Matrix& a, const Matrix& b, double c) {
  const Matrix ab = a * b;
  const int dv = static_cast<int>(a.rows());
  const int du = static_cast<int>(b.rows());
  DenseTensor out(std::vector<int>{dv, du, du, du});
  for (int i = 0; i < dv; ++i)
    for (int j = 0; j < du; ++j)
      for (int k = 0; k < du; ++k)
        for (int l = 0; l < du; ++l) {
          double s = 0;
          for (int m = 0; m < b.cols(); ++m) s += ab(i, m) * b(j, m) * b(k, m) * b(l, m);
          out.at({i, j, k, l}) = c * s;
        }
  return out;
}

DenseTensor k4_vuuv(const Matrix& a, const Matrix& b, double c) {
  const Matrix ab = a * b;
  const int dv = static_cast<int>(a.rows());
  const int du = static_cast<int>(b.rows());
  DenseTensor out(std::vector<int>{dv, du, du, dv});
  for (int i = 0; i < dv; ++i)
    for (int j = 0; j < du; ++j)
      for (int k = 0; k < du; ++k)
        for (int l = 0; l < dv; ++l) {
          double s = 0;
          for (int m = 0; m < b.cols(); ++m) s += ab(i, m) * b(j, m) * b(k, m) * ab(l, m);
          out.at({i, j, k, l}) = c * s;
        }
  return out;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// ---------------------------------------------------------------------------

void criterion1() {
  double worst = 0;
  Rng rng(1001);
  for (int d : {1, 2})
    for (int t = 2; t <= 4; ++t)
      for (int n : {5, 20}) {
        std::vector<Matrix> views;
        for (int v = 0; v < t; ++v) {
          Matrix x(n, d);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j)
              x(i, j) = (v % 2 == 0) ? rng.normal() : rng.uniform(-1.0, 1.0);
          views.push_back(std::move(x));
        }
        for (int v = 1; v < t; ++v) views[v] += 0.5 * views[0];  // shared source
        std::vector<const Matrix*> ptrs;
        for (const Matrix& m : views) ptrs.push_back(&m);
        const DenseTensor fast = rca::cross_cumulant(ptrs);
        const DenseTensor slow = oracle::cross_cumulant(views);
        worst = std::max(worst, (fast - slow).max_abs());
        const DenseTensor afast = rca::auto_cumulant(views[0], t);
        const DenseTensor aslow = oracle::cross_cumulant(std::vector<Matrix>(t, views[0]));
        worst = std::max(worst, (afast - aslow).max_abs());
      }
  verdict(1, worst <= 1e-12,
          "cumulant estimators match the brute-force partition oracle (t<=4, d<=2, n<=20); "
          "max |diff| = " + fmt(worst) + ", tol 1e-12");
}

void criterion2() {
  const int blocks = 20, nb = 5000, n = blocks * nb, d = 2;
  Rng rng(2001);
  Matrix g1(d, d), g2(d, d);
  g1 << 1.0, 0.0, 0.6, 0.8;
  g2 << 0.9, 0.3, -0.2, 1.1;
  Matrix ex(n, d), wy(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) {
      ex(i, j) = rng.exponential() - 1.0;
      wy(i, j) = rng.uniform(-1.0, 1.0);
    }
  const Matrix x = ex * g1.transpose();  // skewed, heavy-tailed
  const Matrix y = wy * g2.transpose();  // symmetric, negative kurtosis

  double worst_z = 0;
  for (int t = 2; t <= 4; ++t) {
    DenseTensor full = rca::auto_cumulant(x + y, t);
    full -= rca::auto_cumulant(x, t);
    full -= rca::auto_cumulant(y, t);
    std::vector<DenseTensor> block_defect;
    for (int b = 0; b < blocks; ++b) {
      const Matrix xb = x.middleRows(b * nb, nb);
      const Matrix yb = y.middleRows(b * nb, nb);
      DenseTensor dfb = rca::auto_cumulant(xb + yb, t);
      dfb -= rca::auto_cumulant(xb, t);
      dfb -= rca::auto_cumulant(yb, t);
      block_defect.push_back(std::move(dfb));
    }
    for (std::size_t e = 0; e < full.size(); ++e) {
      double mean = 0;
      for (const auto& bd : block_defect) mean += bd[e];
      mean /= blocks;
      double var = 0;
      for (const auto& bd : block_defect) var += (bd[e] - mean) * (bd[e] - mean);
      var /= (blocks - 1);
      const double se = std::max(std::sqrt(var / blocks), 1e-14);
      worst_z = std::max(worst_z, std::abs(full[e]) / se);
    }
  }

  // Multilinearity as a finite-sample polynomial identity.
  Rng mr(2003);
  double worst_ml = 0;
  for (int t : {3, 4}) {
    const int nn = 400;
    std::vector<Matrix> views;
    for (int v = 0; v < t; ++v) {
      Matrix m(nn, d);
      for (int i = 0; i < nn; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = mr.uniform(-1.0, 1.0);
      views.push_back(std::move(m));
    }
    for (int v = 1; v < t; ++v) views[v] += 0.7 * views[0];
    std::vector<Matrix> maps;
    std::vector<Matrix> mapped;
    for (int v = 0; v < t; ++v) {
      Matrix m(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = mr.uniform(-1.0, 1.0);
      maps.push_back(m);
      mapped.push_back(views[v] * m.transpose());
    }
    std::vector<const Matrix*> vp, mp;
    for (const Matrix& m : views) vp.push_back(&m);
    for (const Matrix& m : mapped) mp.push_back(&m);
    const DenseTensor lhs = rca::cross_cumulant(mp);
    const DenseTensor rhs = rca::push_through_maps(rca::cross_cumulant(vp), maps);
    worst_ml = std::max(worst_ml, (lhs - rhs).max_abs());
    // slot linearity
    Matrix alt = views[0];
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j < d; ++j) alt(i, j) = mr.uniform(-1.0, 1.0);
    const Matrix combo = 1.7 * views[0] - 0.4 * alt;
    std::vector<const Matrix*> cp = vp, ap = vp;
    cp[0] = &combo;
    ap[0] = &alt;
    DenseTensor lin = rca::cross_cumulant(vp) * 1.7;
    lin -= 0.4 * rca::cross_cumulant(ap);
    worst_ml = std::max(worst_ml, (rca::cross_cumulant(cp) - lin).max_abs());
  }

  verdict(2, worst_z <= 5.0 && worst_ml <= 1e-8,
          "additivity defect within 5 standard errors at n=1e5 (worst z = " + fmt(worst_z) +
          "); multilinearity identity max |diff| = " + fmt(worst_ml) + ", tol 1e-8");
}

void criterion3() {
  Rng rng(3001);
  double worst_exact = 0;
  // square d = 2, 3 and rectangular 3 <- 2, dense fourth cumulants
  for (auto [dv, du] : {std::pair{2, 2}, std::pair{3, 3}, std::pair{3, 2}}) {
    const Matrix a = random_invertible(rng, dv, du, 0.3);
    const Matrix b = random_invertible(rng, du, du, 0.2);
    const Matrix a_hat = rca::estimate_A_from_cumulants(k4_vuuu(a, b, 6.0), k4_vuuv(a, b, 6.0));
    worst_exact = std::max(worst_exact, (a_hat - a).cwiseAbs().maxCoeff());
  }

  // sampled consistency at d = 5: entrywise MSE decreasing from n = 1e4 to 1e5
  const int d = 5, n_big = 100000, n_small = 10000;
  Rng ar(3101);
  const Matrix a5 = random_invertible(ar, d, d, 0.3);
  Rng dr(3103);
  Matrix s1(n_big, d), s2(n_big, d), s3(n_big, d);
  for (int i = 0; i < n_big; ++i)
    for (int j = 0; j < d; ++j) {
      s1(i, j) = dr.normal();
      s2(i, j) = dr.exponential() - 1.0;
      s3(i, j) = dr.normal();
    }
  const Matrix u = s1 + s2;
  const Matrix v = s2 * a5.transpose() + s3;
  const Matrix a_small = rca::estimate_A(u.topRows(n_small), v.topRows(n_small)).first;
  const Matrix a_big = rca::estimate_A(u, v).first;
  const double mse_small = (a_small - a5).squaredNorm() / (d * d);
  const double mse_big = (a_big - a5).squaredNorm() / (d * d);

  verdict(3, worst_exact <= 1e-10 && mse_big < mse_small,
          "map recovery: analytic inputs max |A_hat - A| = " + fmt(worst_exact) +
          " (tol 1e-10); sampled d=5 MSE " + fmt(mse_small) + " (n=1e4) -> " + fmt(mse_big) +
          " (n=1e5), decreasing");
}

void criterion4() {
  rca::ExperimentConfig cfg;
  cfg.setting = Setting::pca;
  cfg.d = 10;
  cfg.n = 1000;
  cfg.perturbation_ratio = 2.0;
  cfg.seed = 4000;
  int wins = 0;
  double worst_margin = 1e300;
  for (int rep = 0; rep < 10; ++rep) {
    const rca::GeneratedData data = rca::generate(cfg, cfg.seed + 1 + rep);
    const Matrix sigma1 =
        data.truth_vec * data.truth_vec.transpose() + 0.25 * Matrix::Identity(10, 10);
    const Matrix a_hat = rca::estimate_A(data.u, data.v).first;
    const rca::ComponentCumulants ext = rca::extract_cumulants(data.u, data.v, a_hat, 2);
    const double err_rca = (rca::as_matrix(ext.of(1, 2)) - sigma1).norm();
    const double err_naive = (rca::as_matrix(rca::auto_cumulant(data.u, 2)) - sigma1).norm();
    if (err_rca < err_naive) ++wins;
    worst_margin = std::min(worst_margin, err_naive / err_rca);
  }

  // The two extraction paths are the same polynomial in the data.
  const rca::GeneratedData data = rca::generate(cfg, cfg.seed + 1);
  const Matrix a_hat = rca::estimate_A(data.u, data.v).first;
  double worst_path = 0;
  for (int t = 2; t <= 4; ++t) {
    const DenseTensor pa = rca::extract_s2_pattern_average(data.u, data.v, a_hat, t);
    const DenseTensor si = rca::extract_s2_sum_identity(data.u, data.v, a_hat, t);
    worst_path = std::max(worst_path, (pa - si).max_abs());
  }

  verdict(4, wins >= 9 && worst_path <= 1e-8,
          "extracted kappa2(S1) beats naive kappa2(U) in " + std::to_string(wins) +
          "/10 repeats (worst naive/rca error ratio " + fmt(worst_margin) +
          "); extraction paths agree, max |diff| = " + fmt(worst_path) + ", tol 1e-8");
}

void criterion5() {
  Rng rng(5001);
  const int d = 2;
  bool ok = true;
  std::string why;

  // (a) contrastive set system with exact model cumulants
  const Matrix b1 = random_invertible(rng, d, d, 0.2);
  const Matrix b2 = random_invertible(rng, d, d, 0.2);
  const Matrix b3 = random_invertible(rng, d, d, 0.2);
  const Matrix a = random_invertible(rng, d, d, 0.3);
  rca::SetSystem sys;
  sys.k = 2;
  sys.subsets = {{0}, {0, 1}, {1}};
  using Exact = rca::ExactModelCumulants;
  std::vector<Exact::Component> comps(3);
  comps[0].subset = {0};
  comps[0].maps = {{0, Matrix::Identity(d, d)}};
  comps[1].subset = {0, 1};
  comps[1].maps = {{0, Matrix::Identity(d, d)}, {1, a}};
  comps[2].subset = {1};
  comps[2].maps = {{1, Matrix::Identity(d, d)}};
  const Matrix* bs[3] = {&b1, &b2, &b3};
  for (int j = 0; j < 3; ++j)
    for (int t = 2; t <= 3; ++t)
      comps[j].kappa[t] = mixed_iid_cumulant(*bs[j], t, t == 2 ? 1.0 : 2.0);
  const Exact provider(2, d, comps);
  const rca::GeneralExtraction ext = rca::find_linear(provider, sys);
  double worst = 0;
  worst = std::max(worst, (ext.maps[1][1] - a).cwiseAbs().maxCoeff());
  for (int t = 2; t <= 3; ++t) {
    const auto kappas = rca::compute_cumulants(provider, sys, ext, t);
    for (int j = 0; j < 3; ++j)
      worst = std::max(worst, (kappas[j] - comps[j].kappa.at(t)).max_abs());
  }
  // contrastive module on the same exact third-order tensors
  {
    const Matrix ab = a * b2;
    DenseTensor k_vuu(std::vector<int>{d, d, d}), k_vuv(std::vector<int>{d, d, d});
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double su = 0, sv = 0;
          for (int m = 0; m < d; ++m) {
            su += ab(i, m) * b2(j, m) * b2(k, m);
            sv += ab(i, m) * b2(j, m) * ab(k, m);
          }
          k_vuu.at({i, j, k}) = 2.0 * su;
          k_vuv.at({i, j, k}) = 2.0 * sv;
        }
    const Matrix a_contrastive = rca::estimate_A_from_cumulants(k_vuu, k_vuv);
    worst = std::max(worst, (a_contrastive - ext.maps[1][1]).cwiseAbs().maxCoeff());
  }
  if (ext.L != 2 || ext.zero[0] || ext.zero[1] || ext.zero[2]) {
    ok = false;
    why += " contrastive-system extraction flags wrong;";
  }
  if (worst > 1e-6) {
    ok = false;
    why += " general-vs-contrastive max |diff| " + fmt(worst) + " > 1e-6;";
  }

  // (b) three views, nested subsets, exact recovery at 1e-8
  rca::SetSystem sys3;
  sys3.k = 3;
  sys3.subsets = {{0, 1}, {1, 2}, {0, 1, 2}};
  const Matrix ma = random_invertible(rng, d, d, 0.3);
  const Matrix mb = random_invertible(rng, d, d, 0.3);
  const Matrix mc1 = random_invertible(rng, d, d, 0.3);
  const Matrix mc2 = random_invertible(rng, d, d, 0.3);
  std::vector<Exact::Component> c3(3);
  c3[0].subset = {0, 1};
  c3[0].maps = {{0, Matrix::Identity(d, d)}, {1, ma}};
  c3[1].subset = {1, 2};
  c3[1].maps = {{1, Matrix::Identity(d, d)}, {2, mb}};
  c3[2].subset = {0, 1, 2};
  c3[2].maps = {{0, Matrix::Identity(d, d)}, {1, mc1}, {2, mc2}};
  const Matrix* gs[3] = {&b1, &b3, &b2};
  for (int j = 0; j < 3; ++j) c3[j].kappa[3] = mixed_iid_cumulant(*gs[j], 3, 2.0);
  const Exact provider3(3, d, c3);
  const rca::GeneralExtraction ext3 = rca::find_linear(provider3, sys3);
  double worst3 = 0;
  worst3 = std::max(worst3, (ext3.maps[0][1] - ma).cwiseAbs().maxCoeff());
  worst3 = std::max(worst3, (ext3.maps[1][2] - mb).cwiseAbs().maxCoeff());
  worst3 = std::max(worst3, (ext3.maps[2][1] - mc1).cwiseAbs().maxCoeff());
  worst3 = std::max(worst3, (ext3.maps[2][2] - mc2).cwiseAbs().maxCoeff());
  const auto kappas3 = rca::compute_cumulants(provider3, sys3, ext3, 3);
  for (int j = 0; j < 3; ++j)
    worst3 = std::max(worst3, (kappas3[j] - c3[j].kappa.at(3)).max_abs());
  if (ext3.L != 2 || ext3.T[2] != std::vector<int>{0, 2}) {
    ok = false;
    why += " three-view certificate wrong;";
  }
  if (worst3 > 1e-8) {
    ok = false;
    why += " three-view recovery max |diff| " + fmt(worst3) + " > 1e-8;";
  }

  // (c) zero component detection: S2 with vanishing third cumulant
  std::vector<Exact::Component> z = comps;
  z[1].kappa[3] = DenseTensor::cube(3, d);
  const Exact providerz(2, d, z);
  const rca::GeneralExtraction extz = rca::find_linear(providerz, sys);
  const auto kz = rca::compute_cumulants(providerz, sys, extz, 3);
  double worstz = std::max((kz[0] - z[0].kappa.at(3)).max_abs(),
                           (kz[2] - z[2].kappa.at(3)).max_abs());
  if (!extz.zero[1] || extz.zero[0] || extz.zero[2] || worstz > 1e-6) {
    ok = false;
    why += " zero detection failed;";
  }

  // (d) the contrastive system certifies at L = 2 and not below
  const auto level = rca::smallest_distinguishable_level(sys);
  const auto at2 = rca::check_distinguishable(sys, 2);
  bool cert_ok = level.has_value() && *level == 2 &&
                 std::holds_alternative<rca::DistinguishingCertificate>(at2) &&
                 std::get<rca::DistinguishingCertificate>(at2).T[1] == std::vector<int>{0, 1};
  if (!cert_ok) {
    ok = false;
    why += " distinguishability level wrong;";
  }

  verdict(5, ok,
          ok ? "general extraction: exact contrastive agreement (max |diff| " + fmt(worst) +
                   ", tol 1e-6), three-view analytic recovery (max |diff| " + fmt(worst3) +
                   ", tol 1e-8), zero component detected, pair system certifies at L=2"
             : "general extraction:" + why);
}

void criterion6() {
  const Vector hdiag = (Vector(3) << 4.0, 2.5, 1.0).finished();
  const Vector theta_star = (Vector(3) << 1.0, -2.0, 0.5).finished();
  const double mu = 1.0, hmax = 4.0;

  rca::ApproxGDConfig cfg;
  cfg.smoothness_H = hmax;
  cfg.max_iters = 200;
  std::vector<double> dist;
  const auto exact_grad = [&](const Vector& th, int) {
    dist.push_back((th - theta_star).norm());
    return Vector((hdiag.array() * (th - theta_star).array()).matrix());
  };
  const rca::ApproxGDResult unbiased = rca::approx_gd(exact_grad, Vector::Zero(3), cfg);
  dist.push_back((unbiased.theta - theta_star).norm());
  const double bound = 1.0 - mu / (4.0 * hmax);
  double worst_ratio = 0;
  for (std::size_t i = 0; i + 1 < dist.size(); ++i)
    if (dist[i] > 1e-12) worst_ratio = std::max(worst_ratio, dist[i + 1] / dist[i]);

  double worst_frac = 0;
  bool biased_ok = true;
  for (double eps : {0.1, 0.01, 0.001}) {
    for (int mode = 0; mode < 2; ++mode) {
      rca::ApproxGDConfig bcfg;
      bcfg.smoothness_H = hmax;
      bcfg.max_iters = 800;
      const auto biased_grad = [&](const Vector& th, int it) {
        Vector b = Vector::Zero(3);
        if (mode == 0)
          b(2) = -1.0;  // push along the softest curvature direction
        else
          b(it % 3) = (it % 2 == 0) ? 1.0 : -1.0;
        return Vector((hdiag.array() * (th - theta_star).array()).matrix() + eps * b);
      };
      const rca::ApproxGDResult res = rca::approx_gd(biased_grad, Vector::Zero(3), bcfg);
      const double d2 = (res.theta - theta_star).squaredNorm();
      const double cap = 8.0 * eps * eps / (mu * mu);
      if (!(d2 > 0 && d2 <= cap)) biased_ok = false;
      worst_frac = std::max(worst_frac, d2 / cap);
    }
  }

  verdict(6, worst_ratio <= bound + 1e-12 && biased_ok,
          "biased-oracle fixed point obeys ||theta - theta*||^2 <= 8 eps^2/mu^2 for eps in "
          "{0.1, 0.01, 0.001} (worst fraction of cap " + fmt(worst_frac) +
          "); per-step contraction " + fmt(worst_ratio) + " <= 1 - mu/4H = " + fmt(bound));
}

void criterion7() {
  const std::vector<double> a = rca::chebyshev_sigmoid(3);
  const double d0 = std::abs(a[0] - 0.5);
  const double d1 = std::abs(a[1] - 0.245);
  const double d3 = std::abs(a[3] - (-0.014));
  verdict(7, d0 <= 0.002 && d1 <= 0.002 && d3 <= 0.002,
          "degree-3 sigmoid fit coefficients (" + fmt(a[0]) + ", " + fmt(a[1]) + ", " + fmt(a[3]) +
          ") match (0.5, 0.245, -0.014) within 0.002");
}

void criterion8() {
  const rca::IsingGraph g = rca::IsingGraph::torus(3);
  const int e = static_cast<int>(g.edges.size());
  double worst_rel = 0;
  double worst_fd = 0;
  for (int draw = 0; draw < 3; ++draw) {
    Rng jr(8001 + draw), kr(8501 + draw);
    Vector j(e), k(e);
    for (int i = 0; i < e; ++i) {
      j(i) = jr.uniform(-1.0, 1.0);
      k(i) = kr.uniform(-0.3, 0.3);
    }
    const rca::IsingExact model = rca::ising_enumerate(g, j);
    const Matrix m2 = rca::exact_m2(model);
    const rca::Moment4Fn m4 = [&](int p, int q, int r, int s) {
      return rca::exact_m4(model, p, q, r, s);
    };
    const Vector ge = rca::composite_gradient_exact(model, g, k);
    const Vector gt = rca::ising_composite_gradient(m2, m4, g, k);
    worst_rel = std::max(worst_rel, (gt - ge).norm() / ge.norm());
    if (draw == 0) {
      const double h = 1e-5;
      for (int idx = 0; idx < e; ++idx) {
        Vector kp = k, km = k;
        kp(idx) += h;
        km(idx) -= h;
        const double fd = (rca::taylor_composite_objective(m2, m4, g, kp) -
                           rca::taylor_composite_objective(m2, m4, g, km)) /
                          (2 * h);
        worst_fd = std::max(worst_fd, std::abs(fd - gt(idx)));
      }
    }
  }
  verdict(8, worst_rel <= 0.10 && worst_fd <= 1e-6,
          "fourth-order score vs exact composite gradient on the enumerated 3x3 torus: worst "
          "relative error " + fmt(worst_rel) + " <= 10%; gradient vs finite differences of the "
          "truncated objective: max |diff| = " + fmt(worst_fd) + ", tol 1e-6");
}

void criterion9() {
  struct Op {
    Setting setting;
    int d;
    double ratio;
    double a_min_sv;
    std::uint64_t seed;
    bool check_c;
  };
  const std::vector<Op> ops = {
      {Setting::pca, 10, 1.0, 0.5, 910, true},
      {Setting::regression, 10, 0.8, 0.5, 920, true},
      {Setting::gmm, 10, 0.7, 0.5, 930, true},
      {Setting::logistic, 10, 1.5, 0.5, 940, false},
      {Setting::ising, 5, 1.0, 0.2, 950, false},
  };
  const std::vector<int> ns = {100, 300, 1000};
  const double t0 = now_seconds();
  bool all_ok = true;
  for (const Op& op : ops) {
    std::vector<std::map<std::string, double>> mean(ns.size());
    bool clean = true;
    std::string failed_cells;
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
      rca::ExperimentConfig cfg;
      cfg.setting = op.setting;
      cfg.d = op.d;
      cfg.n = ns[ni];
      cfg.perturbation_ratio = op.ratio;
      cfg.a_min_sv = op.a_min_sv;
      cfg.seed = op.seed;
      cfg.repeats = 10;
      cfg.arms = {"true", "rca", "naive", "cca"};
      const rca::RunReport rep = rca::run(cfg);
      for (const rca::ArmSummary& s : rep.arms) {
        mean[ni][s.arm] = s.mean_mse;
        if (s.successes != cfg.repeats) {
          clean = false;
          failed_cells += " " + s.arm + "@n=" + std::to_string(ns[ni]) + " " +
                          std::to_string(s.successes) + "/10";
        }
      }
    }
    const double rca_100 = mean[0]["rca"], rca_300 = mean[1]["rca"], rca_1000 = mean[2]["rca"];
    const bool a_ok = rca_1000 < mean[2]["naive"] && rca_1000 < mean[2]["cca"];
    const bool b_ok = rca_300 <= rca_100 * (1 + 1e-9) && rca_1000 <= rca_300 * (1 + 1e-9);
    const bool c_ok = !op.check_c || rca_1000 <= 3.0 * mean[2]["true"];
    if (!(clean && a_ok && b_ok && c_ok)) all_ok = false;
    note(std::string(rca::setting_name(op.setting)) + ": rca " + fmt(rca_100) + " -> " +
         fmt(rca_300) + " -> " + fmt(rca_1000) + " | n=1000 true " + fmt(mean[2]["true"]) +
         ", naive " + fmt(mean[2]["naive"]) + ", cca " + fmt(mean[2]["cca"]) + " | (a) " +
         (a_ok ? "ok" : "VIOLATED") + ", (b) " + (b_ok ? "ok" : "VIOLATED") + ", (c) " +
         (op.check_c ? (c_ok ? "ok, ratio " + fmt(rca_1000 / mean[2]["true"]) : "VIOLATED")
                     : "n/a") +
         (clean ? "" : ", ARM FAILURES:" + failed_cells));
  }
  const double wall = now_seconds() - t0;
  verdict(9, all_ok && wall < 1800.0,
          "five settings, n in {100, 300, 1000}, 10 repeats: recovered-cumulant arm beats naive "
          "and cca at n=1000, is non-increasing in n, and stays within 3x of the true-samples "
          "arm where required; wall " + fmt(wall) + " s < 1800 s");
}

void criterion10() {
  bool ok = true;
  for (int which = 0; which < 2; ++which) {
    rca::ExperimentConfig cfg;
    if (which == 0) {
      cfg.setting = Setting::pca;
      cfg.d = 10;
      cfg.n = 300;
      cfg.repeats = 3;
      cfg.seed = 77;
      cfg.arms = {"true", "rca", "naive", "cca"};
    } else {
      cfg.setting = Setting::ising;
      cfg.d = 3;
      cfg.n = 200;
      cfg.repeats = 2;
      cfg.seed = 78;
      cfg.arms = {"true", "rca"};
    }
    rca::Json j1 = rca::report_to_json(rca::run(cfg));
    rca::Json j2 = rca::report_to_json(rca::run(cfg));
    j1.erase("timing");
    j2.erase("timing");
    if (j1 != j2) ok = false;
  }
  verdict(10, ok, "repeated runs of the same config+seed produce bit-identical reports "
                  "(timing key excluded)");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::printf("acceptance: %d/10 criteria passed\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
