#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "fixtures.hpp"
#include "mpl/sim.hpp"

using namespace mpl;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("sum of squared differences") {
  VectorXd a(2), b(2);
  a << 1, 2;
  b << 1, 3;
  CHECK(sse(a, a) == 0.0);
  CHECK(sse(a, b) == 1.0);
  CHECK_THROWS_AS(sse(a, VectorXd::Ones(3)), Error);
}

TEST_CASE("value generation") {
  const MatrixXd q = fixtures::demo_quantities();
  const VectorXd pref = fixtures::demo_pref();
  const VectorXd lambda = fixtures::demo_lambda();

  SUBCASE("zero noise reproduces the model exactly") {
    const MatrixXd v = generate_values(q, pref, lambda, 0.0, 99);
    const MatrixXd expect = (pref * lambda.transpose()).cwiseProduct(q);
    CHECK((v - expect).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("a fixed seed is bit-reproducible") {
    const MatrixXd a = generate_values(q, pref, lambda, 1.0, 7);
    const MatrixXd b = generate_values(q, pref, lambda, 1.0, 7);
    CHECK(a == b);
  }

  SUBCASE("small noise keeps the index recoverable") {
    const MatrixXd v = generate_values(q, pref, lambda, 0.01, 7);
    const Panel p = fixtures::make_panel(q, v);
    const MplEstimate est = estimate_mpl(p, CovarianceSpec::ols(4));
    CHECK((est.indices - lambda).cwiseAbs().maxCoeff() < 1e-2);
  }

  SUBCASE("absent cells stay absent") {
    MatrixXd q2 = q;
    q2(1, 1) = 0.0;
    const MatrixXd v = generate_values(q2, pref, lambda, 1.0, 7);
    CHECK(v(1, 1) == 0.0);
  }
}

TEST_CASE("one replication with zero noise is the point estimate") {
  const Panel p = fixtures::demo_panel();
  SimConfig cfg;
  cfg.scheme = Scheme::AdditiveNoise;
  cfg.replications = 1;
  cfg.seed = 5;
  const std::vector<EstimatorSpec> specs{parse_estimator_spec("mpl-ols"),
                                         parse_estimator_spec("tpd")};
  const SimReport report = run_perturbation(p, cfg, specs);
  const MplEstimate point = estimate_fgls(p, Regime::Ols);
  CHECK((report.mean_indices.row(0).transpose() - point.indices).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(report.band_sigma.cwiseAbs().maxCoeff() == 0.0);
  CHECK(report.dropped == std::vector<int>{0, 0});
}

TEST_CASE("replication runs are deterministic under a fixed seed") {
  const Panel p = fixtures::demo_panel();
  SimConfig cfg;
  cfg.scheme = Scheme::AdditiveNoise;
  cfg.noise_mean = 0.4;
  cfg.sd_low = 0.0;
  cfg.sd_high = 0.3;
  cfg.replications = 24;
  cfg.seed = 2024;
  const std::vector<EstimatorSpec> specs{parse_estimator_spec("mpl-gls-d")};
  const SimReport a = run_perturbation(p, cfg, specs);
  const SimReport b = run_perturbation(p, cfg, specs);
  CHECK(a.mean_indices == b.mean_indices);
  CHECK(a.band_sigma == b.band_sigma);
  CHECK(a.per_replication[0] == b.per_replication[0]);
}

TEST_CASE("split runs pool to the single-run mean") {
  const Panel p = fixtures::demo_panel();
  SimConfig cfg;
  cfg.scheme = Scheme::AdditiveNoise;
  cfg.noise_mean = 0.2;
  cfg.sd_low = 0.0;
  cfg.sd_high = 0.25;
  cfg.replications = 40;
  cfg.seed = 77;
  const std::vector<EstimatorSpec> specs{parse_estimator_spec("mpl-ols")};
  const SimReport whole = run_perturbation(p, cfg, specs);

  SimConfig half = cfg;
  half.replications = 20;
  const SimReport first = run_perturbation(p, half, specs);
  half.rep_offset = 20;
  const SimReport second = run_perturbation(p, half, specs);

  for (int t = 0; t < p.cols(); ++t) {
    const double pooled =
        0.5 * (first.mean_indices(0, t) + second.mean_indices(0, t));
    CHECK(std::abs(pooled - whole.mean_indices(0, t)) < 1e-12);
  }
}

TEST_CASE("random-walk scheme perturbs cumulatively") {
  const Panel p = fixtures::demo_panel();
  SimConfig cfg;
  cfg.scheme = Scheme::RandomWalkNoise;
  cfg.noise_mean = -0.05;
  cfg.sd_low = 0.0;
  cfg.sd_high = 0.1;
  cfg.replications = 16;
  cfg.seed = 3;
  const std::vector<EstimatorSpec> specs{parse_estimator_spec("mpl-ols")};
  const SimReport report = run_perturbation(p, cfg, specs);
  CHECK(report.dropped[0] == 0);
  for (int t = 1; t < p.cols(); ++t) CHECK(report.band_sigma(0, t) > 0.0);
}

TEST_CASE("extreme negative drift hits the positivity floor") {
  const Panel p = fixtures::demo_panel();
  SimConfig cfg;
  cfg.scheme = Scheme::RandomWalkNoise;
  cfg.noise_mean = -40.0;
  cfg.sd_low = 0.0;
  cfg.sd_high = 0.01;
  cfg.replications = 2;
  cfg.seed = 4;
  const SimReport report = run_perturbation(p, cfg, {parse_estimator_spec("mpl-ols")});
  bool clamped = false;
  for (const auto& n : report.notes) clamped = clamped || n.find("ClampedValues") == 0;
  CHECK(clamped);
}

TEST_CASE("model scheme regenerates values around the true structure") {
  const Panel p = fixtures::demo_panel();
  SimConfig cfg;
  cfg.scheme = Scheme::GenerateFromModel;
  cfg.sd_low = 0.0;
  cfg.sd_high = 0.0;
  cfg.replications = 1;
  cfg.seed = 8;
  cfg.true_lambda = fixtures::demo_lambda();
  cfg.true_pref = fixtures::demo_pref();
  const SimReport report = run_perturbation(p, cfg, {parse_estimator_spec("mpl-ols")});
  CHECK((report.mean_indices.row(0).transpose() - fixtures::demo_lambda()).cwiseAbs().maxCoeff() <
        1e-10);
  CHECK(report.sse_vs_reference[0] < 1e-20);
}

TEST_CASE("price recovery uses the reference price times the index") {
  CounterRng rng = CounterRng::substream(52, 0);
  const auto nl = fixtures::random_noiseless_panel(rng, 4, 5);
  const MplEstimate est = estimate_mpl(nl.panel, CovarianceSpec::ols(4));
  const RecoveredPrices rec = recover_missing_prices(est, {{1, 2}, {3, 4}});
  CHECK(std::abs(rec.prices[0] - nl.pref(1) * nl.lambda(2)) < 1e-10);
  CHECK(std::abs(rec.prices[1] - nl.pref(3) * nl.lambda(4)) < 1e-10);
  CHECK(rec.warnings.empty());
  CHECK_THROWS_AS(recover_missing_prices(est, {{9, 0}}), Error);

  MplEstimate zeroed = est;
  zeroed.indices(2) = 0.0;
  const RecoveredPrices z = recover_missing_prices(zeroed, {{0, 2}});
  CHECK(z.prices[0] == 0.0);
  CHECK(z.warnings.size() == 1);
}

TEST_CASE("fitted price matrix has unit rank") {
  const MplEstimate est = estimate_fgls(fixtures::demo_panel(), Regime::Ols);
  const MatrixXd phat = price_matrix_estimate(est);
  CHECK(phat.rows() == 4);
  CHECK(phat.cols() == 6);
  Eigen::JacobiSVD<MatrixXd> svd(phat);
  CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));

  const MatrixXd truth = fixtures::demo_pref() * fixtures::demo_lambda().transpose();
  const double got = (phat - truth).squaredNorm();
  CHECK(got == doctest::Approx(0.1157088841).epsilon(1e-6));  // frozen value
}

TEST_CASE("pairwise sum is exact on adversarial orderings") {
  std::vector<double> xs(1000);
  for (int i = 0; i < 1000; ++i) xs[i] = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + i * 1e-9);
  const double naive = [&] {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }();
  CHECK(std::abs(pairwise_sum(xs.data(), xs.size()) - naive) < 1e-9);
}
