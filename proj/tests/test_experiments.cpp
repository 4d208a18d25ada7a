#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rca/experiments.hpp"

using rca::ExperimentConfig;
using rca::Matrix;
using rca::Setting;
using rca::Vector;

namespace {

ExperimentConfig base_config(Setting s, int d, int n) {
  ExperimentConfig cfg;
  cfg.setting = s;
  cfg.d = d;
  cfg.n = n;
  return cfg;
}

}  // namespace

TEST_CASE("setting names round-trip") {
  for (Setting s : {Setting::pca, Setting::regression, Setting::gmm, Setting::logistic,
                    Setting::ising, Setting::general, Setting::biomarker_sim})
    CHECK(rca::setting_from_name(rca::setting_name(s)) == s);
  CHECK_THROWS_AS(rca::setting_from_name("bogus"), rca::invalid_input);
}

TEST_CASE("config validation rejects out-of-range values") {
  ExperimentConfig ok = base_config(Setting::pca, 4, 100);
  CHECK_NOTHROW(ok.validate());

  auto expect_invalid = [](ExperimentConfig cfg) {
    CHECK_THROWS_AS(cfg.validate(), rca::invalid_input);
  };

  ExperimentConfig c = ok;
  c.n = 0;
  expect_invalid(c);
  c = ok;
  c.repeats = 0;
  expect_invalid(c);
  c = ok;
  c.perturbation_ratio = -0.1;
  expect_invalid(c);
  c = ok;
  c.t_max = 7;
  expect_invalid(c);
  c = ok;
  c.poly_degree = 2;
  expect_invalid(c);
  c = ok;
  c.poly_degree = 6;
  expect_invalid(c);
  c = ok;
  c.batch = 0;
  expect_invalid(c);
  c = ok;
  c.sigma = 0.0;
  expect_invalid(c);
  c = ok;
  c.als_tol = 0.0;
  expect_invalid(c);
  c = ok;
  c.a_min_sv = -1.0;
  expect_invalid(c);
  c = ok;
  c.arms = {};
  expect_invalid(c);
  c = ok;
  c.arms = {"true", "oracle"};
  expect_invalid(c);
  c = base_config(Setting::ising, 2, 100);
  expect_invalid(c);
  c = base_config(Setting::gmm, 17, 100);
  expect_invalid(c);
  c = base_config(Setting::biomarker_sim, 1, 100);
  expect_invalid(c);

  SECTION("the general setting wants exactly the rca arm and a valid system") {
    ExperimentConfig g = base_config(Setting::general, 2, 100);
    g.set_system = rca::SetSystem{2, {{0}, {0, 1}, {1}}, std::nullopt};
    expect_invalid(g);  // default four arms
    g.arms = {"rca"};
    CHECK_NOTHROW(g.validate());
    g.set_system.subsets.clear();
    expect_invalid(g);
  }
}

TEST_CASE("effective_t_max follows the consuming learner") {
  ExperimentConfig c = base_config(Setting::pca, 4, 100);
  CHECK(c.effective_t_max() == 2);
  c.setting = Setting::regression;
  CHECK(c.effective_t_max() == 2);
  c.setting = Setting::gmm;
  CHECK(c.effective_t_max() == 3);
  c.setting = Setting::logistic;
  CHECK(c.effective_t_max() == 4);
  c.poly_degree = 5;
  CHECK(c.effective_t_max() == 6);
  c.setting = Setting::ising;
  CHECK(c.effective_t_max() == 4);
  c.t_max = 3;
  CHECK(c.effective_t_max() == 3);  // explicit override wins

  ExperimentConfig g = base_config(Setting::general, 2, 100);
  g.arms = {"rca"};
  g.set_system = rca::SetSystem{2, {{0}, {0, 1}, {1}}, 2};
  CHECK(g.effective_t_max() == 3);  // one order above the certified level
  g.set_system.L = std::nullopt;
  CHECK(g.effective_t_max() == 2);
}

TEST_CASE("generate is deterministic in config and seed") {
  ExperimentConfig cfg = base_config(Setting::pca, 4, 200);
  rca::GeneratedData g1 = rca::generate(cfg, 3);
  rca::GeneratedData g2 = rca::generate(cfg, 3);
  CHECK((g1.u - g2.u).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g1.v - g2.v).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g1.s1 - g2.s1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g1.a - g2.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g1.truth_vec - g2.truth_vec).cwiseAbs().maxCoeff() == 0.0);

  rca::GeneratedData g3 = rca::generate(cfg, 4);
  CHECK((g1.u - g3.u).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("perturbation ratio scales the planted covariance trace") {
  ExperimentConfig cfg = base_config(Setting::pca, 5, 4000);
  cfg.perturbation_ratio = 2.0;
  rca::GeneratedData g = rca::generate(cfg, 11);

  const Matrix s2 = g.u - g.s1;
  const double tr1 = rca::detail::biased_cov_trace(g.s1);
  const double tr2 = rca::detail::biased_cov_trace(s2);
  CHECK(std::abs(tr2 / tr1 - 4.0) < 1e-10);  // ratio enters through the square

  SECTION("ratio zero silences the perturbation exactly") {
    cfg.perturbation_ratio = 0.0;
    rca::GeneratedData q = rca::generate(cfg, 11);
    CHECK((q.u - q.s1).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("scale_to_ratio contracts") {
    Matrix s1(4, 2), flat(4, 2);
    s1 << 1, 0, -1, 0, 2, 1, 0, -1;
    flat.setOnes();  // zero variance
    CHECK((rca::detail::scale_to_ratio(s1, flat, 0.0).array() == 0.0).all());
    CHECK_THROWS_AS(rca::detail::scale_to_ratio(s1, flat, 1.0), rca::degenerate_error);
  }
}

TEST_CASE("pca generator plants a rank-one spike") {
  ExperimentConfig cfg = base_config(Setting::pca, 6, 100000);
  rca::GeneratedData g = rca::generate(cfg, 19);
  CHECK(std::abs(g.truth_vec.norm() - 1.0) < 1e-12);

  const Matrix s1c = rca::centered(g.s1);
  const Matrix cov = s1c.transpose() * s1c / static_cast<double>(cfg.n);
  const Matrix target = g.truth_vec * g.truth_vec.transpose() +
                        cfg.sigma * cfg.sigma * Matrix::Identity(6, 6);
  CHECK((cov - target).norm() < 0.05);

  // the reported conditioning matches the drawn map and respects the floor
  Eigen::JacobiSVD<Matrix> svd(g.a);
  CHECK(g.a_sigma_min == svd.singularValues()(5));
  CHECK(g.a_sigma_max == svd.singularValues()(0));
  CHECK(g.a_sigma_min >= cfg.a_min_sv);
}

TEST_CASE("label-producing generators emit consistent data") {
  ExperimentConfig lg = base_config(Setting::logistic, 4, 500);
  rca::GeneratedData gl = rca::generate(lg, 23);
  REQUIRE(gl.y.size() == 500);
  for (int i = 0; i < 500; ++i) CHECK((gl.y(i) == 0.0 || gl.y(i) == 1.0));

  ExperimentConfig rg = base_config(Setting::regression, 4, 500);
  rca::GeneratedData gr = rca::generate(rg, 23);
  REQUIRE(gr.y.size() == 500);
  CHECK(std::abs(gr.truth_vec.norm() - 1.0) < 1e-12);

  SECTION("biomarker perturbation is one of two lab offsets") {
    ExperimentConfig bio = base_config(Setting::biomarker_sim, 4, 300);
    rca::GeneratedData gb = rca::generate(bio, 29);
    const Matrix s2 = gb.u - gb.s1;
    // every row equals one of the first two distinct rows
    Vector r0 = s2.row(0).transpose();
    int other = -1;
    for (int r = 1; r < 300; ++r)
      if ((s2.row(r).transpose() - r0).cwiseAbs().maxCoeff() > 1e-12) {
        other = r;
        break;
      }
    REQUIRE(other >= 0);
    Vector r1 = s2.row(other).transpose();
    for (int r = 0; r < 300; ++r) {
      const double d0 = (s2.row(r).transpose() - r0).cwiseAbs().maxCoeff();
      const double d1 = (s2.row(r).transpose() - r1).cwiseAbs().maxCoeff();
      CHECK(std::min(d0, d1) < 1e-12);
    }
    for (int i = 0; i < 300; ++i) CHECK((gb.y(i) == 0.0 || gb.y(i) == 1.0));
  }
}

TEST_CASE("gmm and ising generators expose their ground truth") {
  ExperimentConfig gm = base_config(Setting::gmm, 3, 400);
  rca::GeneratedData gg = rca::generate(gm, 31);
  REQUIRE(gg.truth_centers.rows() == 3);
  REQUIRE(gg.truth_centers.cols() == 3);
  CHECK(gg.truth_centers.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);

  ExperimentConfig is = base_config(Setting::ising, 3, 300);
  rca::GeneratedData gi = rca::generate(is, 37);
  CHECK(gi.graph.n_spins == 9);
  REQUIRE(gi.truth_couplings.size() == 18);
  CHECK(gi.truth_couplings.cwiseAbs().maxCoeff() <= 1.0);
  CHECK((gi.s1.cwiseAbs().array() == 1.0).all());
  // the spin perturbation has one amplitude at every site
  const Matrix s2 = gi.u - gi.s1;
  CHECK(std::abs(s2.cwiseAbs().maxCoeff() - s2.cwiseAbs().minCoeff()) < 1e-12);
}

TEST_CASE("general generator anchors each component at the identity") {
  ExperimentConfig cfg = base_config(Setting::general, 2, 50);
  cfg.arms = {"rca"};
  cfg.set_system = rca::SetSystem{2, {{0}, {0, 1}, {1}}, std::nullopt};
  rca::GeneratedData g = rca::generate(cfg, 41);

  REQUIRE(g.views.size() == 2);
  CHECK(g.views[0].rows() == 50);
  REQUIRE(g.true_maps.size() == 3);
  CHECK(g.true_maps[0][0].isIdentity(0.0));
  CHECK(g.true_maps[1][0].isIdentity(0.0));
  CHECK(g.true_maps[2][1].isIdentity(0.0));
  CHECK(g.true_maps[0][1].cwiseAbs().maxCoeff() == 0.0);  // view 1 unused by {0}
  Eigen::JacobiSVD<Matrix> svd(g.true_maps[1][1]);
  CHECK(svd.singularValues()(1) >= cfg.a_min_sv);
}

TEST_CASE("cca_projection removes only correlated directions") {
  rca::Rng rng(977);
  const int n = 50000;

  SECTION("independent views keep the identity") {
    Matrix u = rca::detail::uniform_matrix(rng, n, 4);
    Matrix v = rca::detail::uniform_matrix(rng, n, 4);
    CHECK(rca::cca_projection(u, v).isIdentity(0.0));
  }

  SECTION("identical views leave nothing: the zero projector") {
    Matrix u = rca::detail::uniform_matrix(rng, 2000, 3);
    CHECK(rca::cca_projection(u, u).isZero(0.0));
  }

  SECTION("one shared coordinate costs one dimension") {
    Matrix u = rca::detail::uniform_matrix(rng, n, 3);
    Matrix v = rca::detail::uniform_matrix(rng, n, 3);
    v.col(0) = u.col(0);
    Matrix p = rca::cca_projection(u, v);
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(p.trace() - 2.0) < 1e-9);
    // the projected U no longer correlates with V
    const Matrix pu = rca::centered(u) * p.transpose();
    const Matrix cross = pu.transpose() * rca::centered(v) / static_cast<double>(n);
    CHECK(cross.cwiseAbs().maxCoeff() < 0.05);
  }

  SECTION("contracts") {
    Matrix u = rca::detail::uniform_matrix(rng, 500, 3);
    CHECK_THROWS_AS(rca::cca_projection(u, Matrix::Zero(499, 3)), rca::invalid_input);
    Matrix dup = u;
    dup.col(2) = dup.col(1);  // singular covariance
    CHECK_THROWS_AS(rca::cca_projection(dup, Matrix::Zero(500, 3)), rca::degenerate_error);
  }
}

TEST_CASE("run aggregates repeats deterministically") {
  ExperimentConfig cfg = base_config(Setting::pca, 4, 300);
  cfg.arms = {"true", "rca", "naive"};
  cfg.repeats = 2;
  cfg.seed = 7;

  rca::RunReport r1 = rca::run(cfg);
  rca::RunReport r2 = rca::run(cfg);
  REQUIRE(r1.repeats.size() == 2);
  REQUIRE(r1.arms.size() == 3);
  CHECK(r1.wall_ms > 0.0);

  for (std::size_t i = 0; i < r1.repeats.size(); ++i) {
    CHECK(r1.repeats[i].sub_seed == cfg.seed + 1 + i);
    REQUIRE(r1.repeats[i].arms.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(r1.repeats[i].arms[j].ok);
      CHECK(r1.repeats[i].arms[j].mse == r2.repeats[i].arms[j].mse);
    }
  }
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(r1.arms[j].arm == cfg.arms[j]);
    CHECK(r1.arms[j].successes == 2);
    CHECK(r1.arms[j].failures == 0);
    CHECK(r1.arms[j].mean_mse == r2.arms[j].mean_mse);
    CHECK(r1.arms[j].std_mse == r2.arms[j].std_mse);
  }

  // the oracle arm sees the signal itself and must beat the contaminated arm
  CHECK(r1.arms[0].mean_mse < r1.arms[2].mean_mse);
}

TEST_CASE("arm failures are recorded without aborting the run") {
  ExperimentConfig cfg = base_config(Setting::gmm, 3, 60);
  cfg.arms = {"rca"};
  cfg.repeats = 2;
  cfg.ls_iters = 1;  // a single sweep can never satisfy the convergence test
  rca::RunReport report = rca::run(cfg);
  REQUIRE(report.arms.size() == 1);
  CHECK(report.arms[0].successes == 0);
  CHECK(report.arms[0].failures == 2);
  CHECK(report.arms[0].mean_mse == 0.0);
  for (const auto& rep : report.repeats) {
    REQUIRE(rep.arms.size() == 1);
    CHECK(!rep.arms[0].ok);
    CHECK(rep.arms[0].error.find("best residual") != std::string::npos);
  }
}

TEST_CASE("iterative arms record their gradient traces") {
  ExperimentConfig cfg = base_config(Setting::ising, 3, 400);
  cfg.arms = {"true", "rca"};
  cfg.repeats = 1;
  cfg.sgd_steps = 30;
  cfg.batch = 50;
  rca::RunReport report = rca::run(cfg);
  for (const auto& arm : report.repeats[0].arms) {
    CHECK(arm.ok);
    CHECK(arm.trace.size() == 30);
    CHECK(std::isfinite(arm.mse));
  }

  ExperimentConfig lg = base_config(Setting::logistic, 3, 2000);
  lg.arms = {"rca"};
  lg.repeats = 1;
  lg.gd_iters = 50;
  rca::RunReport lr = rca::run(lg);
  CHECK(lr.repeats[0].arms[0].ok);
  CHECK(lr.repeats[0].arms[0].trace.size() == 50);
}

TEST_CASE("the rca arm can estimate the map from data") {
  ExperimentConfig cfg = base_config(Setting::pca, 4, 4000);
  cfg.arms = {"rca"};
  cfg.repeats = 1;
  cfg.estimate_a = true;
  rca::RunReport report = rca::run(cfg);
  CHECK(report.repeats[0].arms[0].ok);
  CHECK(report.repeats[0].arms[0].mse <= 2.0);  // aligned unit vectors never exceed 2
}

TEST_CASE("the general arm scores map recovery") {
  ExperimentConfig cfg = base_config(Setting::general, 2, 20000);
  cfg.arms = {"rca"};
  cfg.repeats = 2;
  cfg.set_system = rca::SetSystem{2, {{0}, {0, 1}, {1}}, std::nullopt};
  rca::RunReport report = rca::run(cfg);
  CHECK(report.arms[0].successes == 2);
  CHECK(report.arms[0].mean_mse < 0.01);
}

TEST_CASE("sweep runs every configuration in order") {
  std::vector<ExperimentConfig> grid;
  for (int n : {100, 300}) {
    ExperimentConfig cfg = base_config(Setting::pca, 4, n);
    cfg.arms = {"rca"};
    cfg.repeats = 2;
    cfg.seed = 42;
    grid.push_back(cfg);
  }
  std::vector<rca::RunReport> reports = rca::sweep(grid);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].config.n == 100);
  CHECK(reports[1].config.n == 300);
  for (const auto& r : reports) CHECK(r.arms[0].successes == 2);
}
