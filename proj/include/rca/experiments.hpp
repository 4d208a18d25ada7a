#pragma once

#include <Eigen/QR>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "rca/contrastive.hpp"
#include "rca/general.hpp"
#include "rca/ising.hpp"
#include "rca/learners.hpp"
#include "rca/random.hpp"

namespace rca {

enum class Setting { pca, regression, gmm, logistic, ising, general, biomarker_sim };

inline const char* setting_name(Setting s) {
  switch (s) {
    case Setting::pca: return "pca";
    case Setting::regression: return "regression";
    case Setting::gmm: return "gmm";
    case Setting::logistic: return "logistic";
    case Setting::ising: return "ising";
    case Setting::general: return "general";
    case Setting::biomarker_sim: return "biomarker_sim";
  }
  throw invalid_input("setting_name: unknown setting");
}

inline Setting setting_from_name(const std::string& s) {
  if (s == "pca") return Setting::pca;
  if (s == "regression") return Setting::regression;
  if (s == "gmm") return Setting::gmm;
  if (s == "logistic") return Setting::logistic;
  if (s == "ising") return Setting::ising;
  if (s == "general") return Setting::general;
  if (s == "biomarker_sim") return Setting::biomarker_sim;
  throw invalid_input("unknown setting: " + s);
}

inline const std::vector<std::string>& known_arms() {
  static const std::vector<std::string> arms = {"true", "rca", "naive", "cca"};
  return arms;
}

struct ExperimentConfig {
  Setting setting = Setting::pca;
  int d = 10;  // dimension; Ising: torus side (d*d spins)
  int n = 1000;
  double perturbation_ratio = 1.0;  // std(S2)/std(S1), matched on covariance traces
  std::uint64_t seed = 0;
  std::vector<std::string> arms = {"true", "rca", "naive", "cca"};
  int repeats = 10;
  int t_max = 0;  // 0: per-setting default
  int poly_degree = 4;
  int batch = 100;
  double sigma = 0.5;      // noise scale in the pca/gmm generators
  double a_min_sv = 0.1;   // rejection floor on sigma_min(A)
  double radius = 1.1;     // projection ball for the polynomial logistic ascent
  double cca_threshold = 0.3;
  int sgd_steps = 200;     // Ising SGD
  double sgd_step = 0.1;
  int gd_iters = 400;      // logistic surrogate ascent
  int ls_iters = 200;      // GMM alternating least squares
  double als_tol = 1e-5;   // GMM sweep-convergence tolerance on noisy tensors
  int restarts = 10;
  bool estimate_a = false;  // rca arm estimates A instead of using the generator's
  SetSystem set_system;     // general setting only

  void validate() const {
    if (n < 1) throw invalid_input("config: n must be at least 1");
    if (repeats < 1) throw invalid_input("config: repeats must be at least 1");
    if (perturbation_ratio < 0) throw invalid_input("config: perturbation_ratio must be >= 0");
    if (t_max < 0 || t_max > kMaxCumulantOrder) throw invalid_input("config: t_max must be in 0..6");
    if (poly_degree < 3 || poly_degree > 5)
      throw invalid_input("config: poly_degree must be 3, 4 or 5");
    if (batch < 1 || sgd_steps < 1 || gd_iters < 1 || ls_iters < 1 || restarts < 1)
      throw invalid_input("config: iteration counts must be positive");
    if (!(sigma > 0)) throw invalid_input("config: sigma must be positive");
    if (!(als_tol > 0)) throw invalid_input("config: als_tol must be positive");
    if (!(a_min_sv >= 0)) throw invalid_input("config: a_min_sv must be nonnegative");
    if (arms.empty()) throw invalid_input("config: at least one arm required");
    for (const auto& a : arms) {
      bool known = false;
      for (const auto& k : known_arms()) known |= a == k;
      if (!known) throw invalid_input("config: unknown arm " + a);
    }
    switch (setting) {
      case Setting::ising:
        if (d < 3) throw invalid_input("config: ising torus side must be at least 3");
        break;
      case Setting::gmm:
        if (d < 1 || d > 16) throw invalid_input("config: gmm needs 1 <= d <= 16");
        break;
      case Setting::biomarker_sim:
        if (d < 2) throw invalid_input("config: biomarker_sim needs d >= 2");
        break;
      case Setting::general:
        set_system.validate();
        if (arms != std::vector<std::string>{"rca"})
          throw invalid_input("config: the general setting defines only the rca arm");
        break;
      default:
        if (d < 1) throw invalid_input("config: d must be positive");
    }
  }

  // Highest cumulant order the downstream learner consumes.
  int effective_t_max() const {
    if (t_max > 0) return t_max;
    switch (setting) {
      case Setting::pca:
      case Setting::regression: return 2;
      case Setting::gmm: return 3;
      case Setting::logistic:
      case Setting::biomarker_sim: return poly_degree == 5 ? 6 : 4;
      case Setting::ising: return 4;
      case Setting::general: return set_system.L ? *set_system.L + 1 : 2;
    }
    return 2;
  }
};

struct GeneratedData {
  Matrix u, v, s1, a;
  Vector y;                // labels/targets (regression, logistic, biomarker_sim)
  Vector truth_vec;        // v1 or beta
  Matrix truth_centers;    // gmm
  Vector truth_couplings;  // ising
  IsingGraph graph;        // ising
  SetSystem sys;                               // general
  std::vector<Matrix> views;                   // general
  std::vector<std::vector<Matrix>> true_maps;  // general: [component][view]
  double a_sigma_min = 0.0, a_sigma_max = 0.0;
};

namespace detail {

inline Vector unit_vector(Rng& rng, int d) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.normal();
  const double norm = v.norm();
  return norm > 0 ? Vector(v / norm) : unit_vector(rng, d);
}

inline Matrix uniform_matrix(Rng& rng, int rows, int cols, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

inline Matrix normal_matrix(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

// Unif[-1,1] entries, rejection-resampled until sigma_min >= min_sv.
inline Matrix random_map(Rng& rng, int d, double min_sv) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Matrix a = uniform_matrix(rng, d, d);
    Eigen::JacobiSVD<Matrix> svd(a);
    if (svd.singularValues()(d - 1) >= min_sv) return a;
  }
  throw degenerate_error("random_map: rejection sampling failed; a_min_sv too high");
}

inline double biased_cov_trace(const Matrix& x) {
  const Matrix c = centered(x);
  return c.squaredNorm() / static_cast<double>(x.rows());
}

// Rescale s2 so that sqrt(trace cov(S2) / trace cov(S1)) equals ratio.
inline Matrix scale_to_ratio(const Matrix& s1, const Matrix& s2, double ratio) {
  if (ratio == 0) return Matrix::Zero(s2.rows(), s2.cols());
  const double tr1 = biased_cov_trace(s1);
  const double tr2 = biased_cov_trace(s2);
  if (!(tr2 > 0)) throw degenerate_error("scale_to_ratio: zero-variance perturbation");
  return s2 * (ratio * std::sqrt(tr1 / tr2));
}

// (I + v2 v2^T) w with w ~ Unif[-1,1]^d rows.
inline Matrix box_perturbation(Rng& rng, int n, int d, const Vector& v2) {
  const Matrix w = uniform_matrix(rng, n, d);
  return w + (w * v2) * v2.transpose();
}

}  // namespace detail

// Deterministic synthetic data for every setting. Draw order is fixed (map A,
// truth parameters, S1, raw S2, labels, perturbation scaling, S3) so that a
// given (config, seed) pair always yields identical bytes.
inline GeneratedData generate(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  GeneratedData out;
  const int n = cfg.n;

  if (cfg.setting == Setting::general) {
    const SetSystem& sys = cfg.set_system;
    out.sys = sys;
    const int d = cfg.d;
    const int p = static_cast<int>(sys.subsets.size());
    out.true_maps.assign(p, std::vector<Matrix>(sys.k, Matrix::Zero(d, d)));
    for (int j = 0; j < p; ++j)
      for (int i : sys.subsets[j])
        out.true_maps[j][i] = i == sys.subsets[j].front()
                                  ? Matrix::Identity(d, d)
                                  : detail::random_map(rng, d, cfg.a_min_sv);
    // centered exponentials with distinct scales: every order-t cumulant is
    // diagonal with entries (t-1)! scale^t, nonzero at all orders
    std::vector<Matrix> comps(p);
    for (int j = 0; j < p; ++j) {
      const double scale = 1.0 + 0.5 * j;
      comps[j] = Matrix(n, d);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < d; ++c) comps[j](r, c) = scale * (rng.exponential() - 1.0);
    }
    out.views.assign(sys.k, Matrix::Zero(n, d));
    for (int j = 0; j < p; ++j)
      for (int i : sys.subsets[j]) out.views[i] += comps[j] * out.true_maps[j][i].transpose();
    return out;
  }

  const int dim = cfg.setting == Setting::ising ? cfg.d * cfg.d : cfg.d;
  out.a = detail::random_map(rng, dim, cfg.a_min_sv);
  {
    Eigen::JacobiSVD<Matrix> svd(out.a);
    out.a_sigma_min = svd.singularValues()(dim - 1);
    out.a_sigma_max = svd.singularValues()(0);
  }

  Matrix s2;
  switch (cfg.setting) {
    case Setting::pca: {
      const Vector v1 = detail::unit_vector(rng, dim);
      const Vector v2 = detail::unit_vector(rng, dim);
      Vector z(n);
      for (int r = 0; r < n; ++r) z(r) = rng.normal();
      out.s1 = z * v1.transpose() + cfg.sigma * detail::normal_matrix(rng, n, dim);
      s2 = detail::box_perturbation(rng, n, dim, v2);
      out.truth_vec = v1;
      break;
    }
    case Setting::regression:
    case Setting::logistic: {
      const Vector beta = detail::unit_vector(rng, dim);
      const Vector v2 = detail::unit_vector(rng, dim);
      out.s1 = detail::uniform_matrix(rng, n, dim);
      s2 = detail::box_perturbation(rng, n, dim, v2);
      const Vector z = out.s1 * beta;
      out.y = Vector(n);
      for (int r = 0; r < n; ++r)
        out.y(r) = cfg.setting == Setting::regression
                       ? z(r) + rng.normal()
                       : (rng.uniform() < sigmoid(z(r)) ? 1.0 : 0.0);
      out.truth_vec = beta;
      break;
    }
    case Setting::gmm: {
      Matrix mu1 = detail::normal_matrix(rng, dim, dim);
      mu1.rowwise() -= mu1.colwise().mean();  // zero-mean mixture
      Matrix mu2 = detail::normal_matrix(rng, dim, dim);
      mu2.rowwise() -= mu2.colwise().mean();
      std::vector<int> z1(n), z2(n);
      for (int r = 0; r < n; ++r) z1[r] = static_cast<int>(rng.below(dim));
      for (int r = 0; r < n; ++r) z2[r] = static_cast<int>(rng.below(dim));
      out.s1 = Matrix(n, dim);
      for (int r = 0; r < n; ++r) out.s1.row(r) = mu1.row(z1[r]);
      out.s1 += cfg.sigma * detail::normal_matrix(rng, n, dim);
      s2 = Matrix(n, dim);
      for (int r = 0; r < n; ++r) s2.row(r) = mu2.row(z2[r]);
      s2 += cfg.sigma * detail::normal_matrix(rng, n, dim);
      out.truth_centers = mu1;
      break;
    }
    case Setting::ising: {
      out.graph = IsingGraph::torus(cfg.d);
      Vector j(static_cast<Eigen::Index>(out.graph.edges.size()));
      for (Eigen::Index e = 0; e < j.size(); ++e) j(e) = rng.uniform(-1.0, 1.0);
      out.truth_couplings = j;
      out.s1 = ising_sample(rng, out.graph, j, n);
      // half the sites share one coin per row, the rest flip independently
      std::vector<int> perm(dim);
      for (int i = 0; i < dim; ++i) perm[i] = i;
      rng.shuffle(perm);
      const int half = dim / 2;
      s2 = Matrix(n, dim);
      for (int r = 0; r < n; ++r) {
        const double shared = rng.sign();
        for (int i = 0; i < half; ++i) s2(r, perm[i]) = shared;
      }
      for (int r = 0; r < n; ++r)
        for (int i = half; i < dim; ++i) s2(r, perm[i]) = rng.sign();
      break;
    }
    case Setting::biomarker_sim: {
      // U holds d test markers biased by one of two per-lab offsets, V holds
      // the control markers carrying the mapped bias of the same lab
      const Vector beta = detail::unit_vector(rng, dim);
      out.s1 = detail::uniform_matrix(rng, n, dim);
      Matrix offsets = detail::normal_matrix(rng, 2, dim);
      offsets.rowwise() -= offsets.colwise().mean();
      s2 = Matrix(n, dim);
      for (int r = 0; r < n; ++r) s2.row(r) = offsets.row(static_cast<int>(rng.below(2)));
      const Vector z = out.s1 * beta;
      out.y = Vector(n);
      for (int r = 0; r < n; ++r) out.y(r) = rng.uniform() < sigmoid(z(r)) ? 1.0 : 0.0;
      out.truth_vec = beta;
      break;
    }
    case Setting::general:
      break;  // handled above
  }

  s2 = detail::scale_to_ratio(out.s1, s2, cfg.perturbation_ratio);
  const Matrix s3 = detail::uniform_matrix(rng, n, dim);
  out.u = out.s1 + s2;
  out.v = s2 * out.a.transpose() + s3;
  return out;
}

// Projector onto the orthogonal complement of the canonical correlation
// subspace of (U, V): whiten both covariances, SVD the whitened cross
// covariance, and remove every canonical direction whose correlation exceeds
// the threshold. No direction above threshold: identity. All directions above:
// the zero projector (nothing of U survives; downstream fits degenerate to the
// empty-model answer instead of aborting the arm).
inline Matrix cca_projection(const Matrix& u, const Matrix& v, double threshold = 0.3,
                             double rank_tol = 1e-10) {
  const Eigen::Index n = u.rows();
  if (v.rows() != n) throw invalid_input("cca_projection: sample counts differ");
  const Matrix uc = centered(u);
  const Matrix vc = centered(v);
  const Matrix cuu = uc.transpose() * uc / static_cast<double>(n);
  const Matrix cvv = vc.transpose() * vc / static_cast<double>(n);
  const Matrix cuv = uc.transpose() * vc / static_cast<double>(n);

  auto inv_sqrt = [&](const Matrix& m, const char* name) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    const Vector& w = es.eigenvalues();
    const double wmax = w(w.size() - 1);
    if (!(w(0) > rank_tol * wmax))
      throw degenerate_error(std::string("cca_projection: singular covariance of ") + name);
    Vector inv = w.array().sqrt().inverse();
    return Matrix(es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose());
  };
  const Matrix wu = inv_sqrt(cuu, "U");
  const Matrix wv = inv_sqrt(cvv, "V");
  Eigen::JacobiSVD<Matrix> svd(wu * cuv * wv, Eigen::ComputeThinU);
  const Vector& rho = svd.singularValues();
  int removed = 0;
  while (removed < rho.size() && rho(removed) > threshold) ++removed;
  const int d = static_cast<int>(u.cols());
  if (removed == 0) return Matrix::Identity(d, d);
  if (removed >= d) return Matrix::Zero(d, d);
  const Matrix dirs = wu * svd.matrixU().leftCols(removed);
  Eigen::HouseholderQR<Matrix> qr(dirs);
  const Matrix q = qr.householderQ() * Matrix::Identity(d, removed);
  return Matrix::Identity(d, d) - q * q.transpose();
}

struct ArmOutcome {
  std::string arm;
  bool ok = false;
  double mse = 0.0;
  std::string error;
  std::vector<double> trace;  // SGD / ascent gradient norms where applicable
};

struct RepeatReport {
  std::uint64_t sub_seed = 0;
  double a_sigma_min = 0.0, a_sigma_max = 0.0;
  std::vector<ArmOutcome> arms;
};

struct ArmSummary {
  std::string arm;
  double mean_mse = 0.0;
  double std_mse = 0.0;
  int successes = 0;
  int failures = 0;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<RepeatReport> repeats;
  std::vector<ArmSummary> arms;
  double wall_ms = 0.0;
};

namespace detail {

inline std::uint64_t arm_tag(const std::string& arm) {
  if (arm == "true") return 1;
  if (arm == "rca") return 2;
  if (arm == "naive") return 3;
  if (arm == "cca") return 4;
  throw invalid_input("unknown arm " + arm);
}

// Cumulants of one source matrix, orders 2..t_max, through the same estimator
// the extraction path uses.
inline std::vector<DenseTensor> sample_cumulants(const Matrix& x, int t_max) {
  Matrix xc = centered(x);
  BlockMomentCache cache({&xc});
  std::vector<DenseTensor> out;
  for (int t = 2; t <= t_max; ++t)
    out.push_back(cross_cumulant_centered(cache, std::vector<int>(t, 0)));
  return out;
}

struct ArmInputs {
  std::vector<DenseTensor> kappa;  // [order - 2]
  const Matrix* exy_source = nullptr;  // rows paired with y for E[YX]
  const Matrix* samples = nullptr;     // raw rows for sample-based learners
};

inline const DenseTensor& kappa_of(const ArmInputs& in, int order) {
  if (order < 2 || order - 2 >= static_cast<int>(in.kappa.size()))
    throw invalid_input("arm cumulants: order out of range");
  return in.kappa[order - 2];
}

}  // namespace detail

// One arm of one repeat. `pu` holds the CCA-projected U when the arm is cca.
inline ArmOutcome run_arm(const ExperimentConfig& cfg, const GeneratedData& data,
                          const std::string& arm, std::uint64_t sub_seed) {
  ArmOutcome out;
  out.arm = arm;
  Rng arm_rng = Rng(sub_seed).fork(detail::arm_tag(arm));
  try {
    if (cfg.setting == Setting::general) {
      if (arm != "rca") throw invalid_input("general setting defines only the rca arm");
      GeneralExtraction ext = find_linear(data.views, data.sys);
      double err = 0.0;
      std::size_t entries = 0;
      const int p = static_cast<int>(data.sys.subsets.size());
      for (int j = 0; j < p; ++j)
        for (int i : data.sys.subsets[j]) {
          err += (ext.maps[j][i] - data.true_maps[j][i]).squaredNorm();
          entries += static_cast<std::size_t>(data.true_maps[j][i].size());
        }
      out.mse = err / static_cast<double>(entries);
      out.ok = true;
      return out;
    }

    const int t_max = cfg.effective_t_max();

    if (cfg.setting == Setting::ising) {
      const IsingSgdOptions opts{cfg.sgd_steps, cfg.sgd_step, cfg.batch};
      IsingFitResult fit;
      if (arm == "rca") {
        const Matrix a_use =
            cfg.estimate_a ? estimate_A(data.u, data.v).first : data.a;
        fit = contrastive_ising(data.u, data.v, a_use, data.graph, opts, arm_rng);
      } else {
        const Matrix* src = &data.u;
        Matrix pu;
        if (arm == "true") src = &data.s1;
        if (arm == "cca") {
          pu = centered(data.u) * cca_projection(data.u, data.v, cfg.cca_threshold).transpose();
          src = &pu;
        }
        fit = ising_sgd_exact(*src, data.graph, opts, arm_rng);
      }
      out.mse = (fit.couplings - data.truth_couplings).squaredNorm() /
                static_cast<double>(data.truth_couplings.size());
      out.trace = std::move(fit.grad_norms);
      out.ok = true;
      return out;
    }

    // Cumulant-consuming settings share one learner path per arm.
    detail::ArmInputs in;
    Matrix pu;
    ComponentCumulants ext;
    if (arm == "rca") {
      const Matrix a_use = cfg.estimate_a ? estimate_A(data.u, data.v).first : data.a;
      ext = extract_cumulants(data.u, data.v, a_use, t_max);
      in.kappa = ext.s1;
      in.exy_source = &data.u;
    } else {
      const Matrix* src = &data.u;
      if (arm == "true") src = &data.s1;
      if (arm == "cca") {
        pu = centered(data.u) * cca_projection(data.u, data.v, cfg.cca_threshold).transpose();
        src = &pu;
      }
      in.kappa = detail::sample_cumulants(*src, t_max);
      in.exy_source = src;
      in.samples = src;
    }

    switch (cfg.setting) {
      case Setting::pca: {
        const PcaResult res = contrastive_pca(as_matrix(detail::kappa_of(in, 2)));
        out.mse = aligned_squared_distance(res.top_eigenvector, data.truth_vec);
        break;
      }
      case Setting::regression: {
        const Vector exy = centered(*in.exy_source).transpose() * data.y /
                           static_cast<double>(data.y.size());
        const Matrix k2 = as_matrix(detail::kappa_of(in, 2));
        Vector beta;
        if (arm == "cca") {
          // the projection rank-reduces kappa2 by design; solve in the surviving subspace
          beta = pinv(0.5 * (k2 + k2.transpose())) * exy;
        } else {
          beta = contrastive_lsr(k2, exy).beta;
        }
        out.mse = (beta - data.truth_vec).squaredNorm();
        break;
      }
      case Setting::gmm: {
        GmmOptions opts;
        opts.ls_iters = cfg.ls_iters;
        opts.restarts = cfg.restarts;
        opts.tol = cfg.als_tol;
        opts.seed = arm_rng.fork(7).seed();
        const GmmResult res = contrastive_gmm(as_matrix(detail::kappa_of(in, 2)),
                                              detail::kappa_of(in, 3), cfg.d, opts);
        out.mse = matched_centers_mse(res.centers, data.truth_centers);
        break;
      }
      case Setting::logistic:
      case Setting::biomarker_sim: {
        Vector beta;
        if (arm == "rca") {
          ApproxGDConfig gd;
          gd.poly_degree = cfg.poly_degree;
          gd.max_iters = cfg.gd_iters;
          gd.radius = cfg.radius;
          PolyLogisticResult res = contrastive_logistic(data.u, data.y, ext, gd);
          beta = std::move(res.beta);
          out.trace = std::move(res.grad_norms);
        } else {
          beta = newton_logistic(centered(*in.samples), data.y);
        }
        out.mse = (beta - data.truth_vec).squaredNorm();
        break;
      }
      default:
        throw invalid_input("run_arm: unhandled setting");
    }
    out.ok = true;
  } catch (const invalid_input& e) {
    out.ok = false;
    out.error = e.what();
  } catch (const degenerate_error& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

// Run all repeats of a configuration. Arm failures are recorded per arm and do
// not stop the run; sub-seeds are seed+1..seed+repeats.
inline RunReport run(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.config = cfg;
  for (int rep = 0; rep < cfg.repeats; ++rep) {
    const std::uint64_t sub_seed = cfg.seed + 1 + static_cast<std::uint64_t>(rep);
    const GeneratedData data = generate(cfg, sub_seed);
    RepeatReport rr;
    rr.sub_seed = sub_seed;
    rr.a_sigma_min = data.a_sigma_min;
    rr.a_sigma_max = data.a_sigma_max;
    for (const auto& arm : cfg.arms) rr.arms.push_back(run_arm(cfg, data, arm, sub_seed));
    report.repeats.push_back(std::move(rr));
  }
  for (const auto& arm : cfg.arms) {
    ArmSummary s;
    s.arm = arm;
    std::vector<double> vals;
    for (const auto& rr : report.repeats)
      for (const auto& a : rr.arms)
        if (a.arm == arm) {
          if (a.ok)
            vals.push_back(a.mse);
          else
            ++s.failures;
        }
    s.successes = static_cast<int>(vals.size());
    if (!vals.empty()) {
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= static_cast<double>(vals.size());
      double var = 0.0;
      for (double v : vals) var += (v - mean) * (v - mean);
      s.mean_mse = mean;
      s.std_mse = std::sqrt(var / static_cast<double>(vals.size()));
    }
    report.arms.push_back(std::move(s));
  }
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

inline std::vector<RunReport> sweep(const std::vector<ExperimentConfig>& configs) {
  std::vector<RunReport> out;
  out.reserve(configs.size());
  for (const auto& cfg : configs) out.push_back(run(cfg));
  return out;
}

}  // namespace rca
