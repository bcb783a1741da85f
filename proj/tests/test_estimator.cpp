#include <doctest.h>

#include <Eigen/Dense>

#include "fixtures.hpp"
#include "mpl/estimator.hpp"
#include "mpl/sim.hpp"

using namespace mpl;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double max_rel_err(const VectorXd& a, const VectorXd& b) {
  double e = 0.0;
  for (long i = 0; i < a.size(); ++i) e = std::max(e, rel_err(a(i), b(i)));
  return e;
}

}  // namespace

TEST_CASE("reciprocal map") {
  VectorXd d(3);
  d << 1.0, 2.0, 0.5;
  VectorXd r = reciprocal_map(d);
  CHECK(r(0) == 1.0);
  CHECK(r(1) == 0.5);
  CHECK(r(2) == 2.0);

  VectorXd z(2);
  z << 1.0, 0.0;
  CHECK(reciprocal_map(z)(1) == 0.0);

  CounterRng rng = CounterRng::substream(3, 0);
  VectorXd x(5);
  for (int i = 0; i < 5; ++i) x(i) = rng.uniform(0.1, 4.0);
  CHECK((reciprocal_map(reciprocal_map(x)) - x).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("noiseless values are fitted exactly") {
  CounterRng rng = CounterRng::substream(5, 1);
  Eigen::MatrixXd q(3, 4), v(3, 4);
  VectorXd pref(3);
  pref << 1.7, 0.4, 2.5;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) {
      q(i, j) = rng.uniform(1.0, 4.0);
      v(i, j) = pref(i) * q(i, j);  // lambda = 1 everywhere
    }
  const Panel p = fixtures::make_panel(q, v);
  const MplEstimate est = estimate_mpl(p, CovarianceSpec::ols(3));
  CHECK((est.deflators.array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK((est.indices.array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(max_rel_err(est.reference_prices, pref) < 1e-10);
  CHECK(est.sigma2 < 1e-20);
}

TEST_CASE("noiseless recovery holds under every regime") {
  CounterRng rng = CounterRng::substream(6, 2);
  const auto nl = fixtures::random_noiseless_panel(rng, 5, 4);
  for (Regime regime : {Regime::Ols, Regime::GlsD, Regime::GlsS, Regime::GlsF}) {
    const MplEstimate est = estimate_fgls(nl.panel, regime);
    CHECK(max_rel_err(est.indices, nl.lambda) < 1e-10);
    CHECK(max_rel_err(est.reference_prices, nl.pref) < 1e-10);
  }
}

TEST_CASE("demo panel spherical fit matches the reference sum of squares") {
  const MplEstimate est = estimate_fgls(fixtures::demo_panel(), Regime::Ols);
  const double got = sse(est.indices, fixtures::demo_lambda());
  CHECK(std::abs(got - 0.00333) <= 1.5e-3);
  CHECK(got == doctest::Approx(0.0033773327).epsilon(1e-6));  // frozen value
  CHECK(est.dof == 24 - 9);
  CHECK(est.warnings.empty());
}

TEST_CASE("demo panel two-step heteroskedastic fit") {
  const MplEstimate est = estimate_fgls(fixtures::demo_panel(), Regime::GlsD);
  const double got = sse(est.indices, fixtures::demo_lambda());
  CHECK(got == doctest::Approx(0.0022766861).epsilon(1e-6));  // frozen value
}

TEST_CASE("covariance recipes") {
  const Panel p = fixtures::demo_panel();

  SUBCASE("spherical regime keeps identity blocks") {
    const CovarianceSpec spec = estimate_omega(p, Regime::Ols);
    CHECK(spec.shared());
    CHECK(spec.blocks[0] == MatrixXd::Identity(4, 4));
  }

  SUBCASE("per-entity mean squared residuals land on the diagonal") {
    Eigen::MatrixXd q(2, 2), v(2, 2);
    q << 1, 1, 1, 1;
    v << 1, 1, 1, 1;
    const Panel tiny = fixtures::make_panel(q, v);
    MatrixXd resid(2, 2);
    resid << 1, -1, 2, -2;
    const CovarianceSpec spec = omega_from_residuals(tiny, resid, Regime::GlsD, 0.25, 0.0);
    CHECK(spec.blocks[0](0, 0) == doctest::Approx(1.0));
    CHECK(spec.blocks[0](1, 1) == doctest::Approx(4.0));
    CHECK(spec.blocks[0](0, 1) == 0.0);
  }

  SUBCASE("absent cells are excluded from the moments") {
    Eigen::MatrixXd q(2, 3), v(2, 3);
    q << 1, 1, 1, 1, 1, 0;
    v << 1, 1, 1, 1, 1, 0;
    const Panel masked = fixtures::make_panel(q, v);
    MatrixXd resid(2, 3);
    resid << 1, -1, 5, 2, -2, 0;
    const CovarianceSpec spec = omega_from_residuals(masked, resid, Regime::GlsD, 0.25, 0.0);
    CHECK(spec.blocks[0](0, 0) == doctest::Approx(27.0 / 3.0));
    CHECK(spec.blocks[0](1, 1) == doctest::Approx(4.0));  // third period masked out
  }

  SUBCASE("heteroskedastic regime yields one shared diagonal block") {
    const CovarianceSpec spec = estimate_omega(p, Regime::GlsD);
    CHECK(spec.shared());
    CHECK(spec.blocks[0].rows() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(spec.blocks[0](i, i) > 0.0);
      for (int j = 0; j < 4; ++j)
        if (i != j) CHECK(spec.blocks[0](i, j) == 0.0);
    }
  }

  SUBCASE("shrinkage pulls the full block toward its diagonal") {
    const CovarianceSpec full = estimate_omega(p, Regime::GlsF, 0.0, 0.0);
    const CovarianceSpec shrunk = estimate_omega(p, Regime::GlsS, 0.5, 0.0);
    for (int i = 0; i < 4; ++i) {
      CHECK(shrunk.blocks[0](i, i) == doctest::Approx(full.blocks[0](i, i)));
      for (int j = 0; j < 4; ++j)
        if (i != j)
          CHECK(shrunk.blocks[0](i, j) == doctest::Approx(0.5 * full.blocks[0](i, j)));
    }
  }
}

TEST_CASE("identity blocks reproduce the spherical estimate exactly") {
  const Panel p = fixtures::demo_panel();
  const MplEstimate a = estimate_mpl(p, CovarianceSpec::ols(4));
  const MplEstimate b =
      estimate_mpl(p, CovarianceSpec::shared_block(Regime::GlsS, MatrixXd::Identity(4, 4)));
  CHECK(a.deflators == b.deflators);
  CHECK(a.reference_prices == b.reference_prices);
}

TEST_CASE("stationary route agrees with the general kernel") {
  CounterRng rng = CounterRng::substream(9, 4);
  for (int trial = 0; trial < 10; ++trial) {
    const Panel p = fixtures::random_panel(rng, 4, 5);
    const MatrixXd block = fixtures::random_spd(rng, 4);
    const MplEstimate a = estimate_mpl(p, CovarianceSpec::shared_block(Regime::GlsS, block));
    const MplEstimate b = estimate_mpl_stationary(p, block);
    CHECK(max_rel_err(a.deflators, b.deflators) < 1e-12);
    CHECK(max_rel_err(a.reference_prices, b.reference_prices) < 1e-12);
  }
}

TEST_CASE("rescaling all values leaves the deflators alone") {
  const Panel p = fixtures::demo_panel();
  Panel scaled = p;
  scaled.values *= 3.25;
  const MplEstimate a = estimate_mpl(p, CovarianceSpec::ols(4));
  const MplEstimate b = estimate_mpl(scaled, CovarianceSpec::ols(4));
  CHECK(max_rel_err(a.deflators, b.deflators) < 1e-12);
  CHECK(max_rel_err(b.reference_prices, 3.25 * a.reference_prices) < 1e-12);
}

TEST_CASE("an entity below the basket rule contributes nothing") {
  const Panel p = fixtures::demo_panel();
  Panel extra = p;
  extra.entities.push_back("once");
  extra.quantities.conservativeResize(5, 6);
  extra.values.conservativeResize(5, 6);
  extra.quantities.row(4).setZero();
  extra.values.row(4).setZero();
  extra.quantities(4, 2) = 7.0;
  extra.values(4, 2) = 21.0;
  const Panel refiltered = filter_panel(extra, reference_basket(extra));
  CHECK(refiltered.rows() == 4);
  const MplEstimate a = estimate_mpl(p, CovarianceSpec::ols(4));
  const MplEstimate b = estimate_mpl(refiltered, CovarianceSpec::ols(4));
  CHECK(a.deflators == b.deflators);
}

TEST_CASE("kernel and uncertainty bookkeeping") {
  const MplEstimate est = estimate_fgls(fixtures::demo_panel(), Regime::Ols);
  CHECK(est.kappa.rows() == 5);
  CHECK(est.kappa.isApprox(est.kappa.transpose(), 1e-12));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(est.kappa, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK(est.deflator_se(est.base_index) == 0.0);
  CHECK(est.index_se(est.base_index) == 0.0);
  for (int t = 1; t < 6; ++t) CHECK(est.deflator_se(t) > 0.0);
}

TEST_CASE("base period can sit anywhere") {
  Panel p = fixtures::demo_panel();
  p.base_index = 2;
  const MplEstimate est = estimate_mpl(p, CovarianceSpec::ols(4));
  CHECK(est.deflators(2) == 1.0);
  CHECK(est.index_se(2) == 0.0);
  // Rebasing an estimated series only approximates re-estimation; the
  // normalization constraint moves with the base.
  const MplEstimate base0 = estimate_mpl(fixtures::demo_panel(), CovarianceSpec::ols(4));
  const VectorXd rebased = base0.indices / base0.indices(2);
  CHECK(max_rel_err(est.indices, rebased) < 5e-2);
}

TEST_CASE("an all-absent entity makes the kernel singular") {
  Eigen::MatrixXd q(2, 3), v(2, 3);
  q << 1, 2, 1, 0, 0, 0;
  v << 2, 5, 2, 0, 0, 0;
  const Panel p = fixtures::make_panel(q, v);
  CHECK_THROWS_AS(estimate_mpl(p, CovarianceSpec::ols(2)), Error);
}

TEST_CASE("covariance spec validation") {
  const Panel p = fixtures::demo_panel();
  MatrixXd indefinite = MatrixXd::Identity(4, 4);
  indefinite(2, 2) = -1.0;
  CHECK_THROWS_AS(estimate_mpl(p, CovarianceSpec::shared_block(Regime::GlsF, indefinite)),
                  Error);
  CHECK_THROWS_AS(estimate_mpl(p, CovarianceSpec::ols(3)), Error);  // wrong dimension
  CovarianceSpec two_blocks = CovarianceSpec::per_period(
      {MatrixXd::Identity(4, 4), MatrixXd::Identity(4, 4)});
  CHECK_THROWS_AS(estimate_mpl(p, two_blocks), Error);  // neither shared nor per period
}

TEST_CASE("a nearly singular block raises the conditioning warning") {
  const Panel p = fixtures::demo_panel();
  MatrixXd block = MatrixXd::Identity(4, 4);
  block(0, 0) = 1e13;
  const MplEstimate est = estimate_mpl(p, CovarianceSpec::shared_block(Regime::GlsF, block));
  bool found = false;
  for (const auto& w : est.warnings) found = found || w.find("IllConditioned") == 0;
  CHECK(found);
}

TEST_CASE("two-period closed form") {
  SUBCASE("single good price ratio") {
    VectorXd q(1), v1(1), v2(1), theta(1);
    q << 1.0;
    v1 << 1.0;
    v2 << 2.0;
    theta << 1.0;
    CHECK(two_period_closed_form(q, q, v1, v2, theta).lambda == doctest::Approx(2.0));
  }

  SUBCASE("a good absent in one period drops out exactly") {
    VectorXd q1(3), q2(3), v1(3), v2(3);
    q1 << 0.0, 2.0, 3.0;
    q2 << 4.0, 1.0, 2.0;
    v1 << 0.0, 3.0, 7.0;
    v2 << 9.0, 2.0, 5.0;
    const VectorXd theta = VectorXd::Ones(3);
    const double full = two_period_closed_form(q1, q2, v1, v2, theta).lambda;
    const double sub = two_period_closed_form(q1.tail(2), q2.tail(2), v1.tail(2), v2.tail(2),
                                              VectorXd::Ones(2))
                           .lambda;
    CHECK(full == sub);
  }

  SUBCASE("matches the general estimator when T = 2") {
    CounterRng rng = CounterRng::substream(12, 5);
    for (int trial = 0; trial < 25; ++trial) {
      const Panel p = fixtures::random_panel(rng, 6, 2);
      const MplEstimate est = estimate_mpl(p, CovarianceSpec::ols(6));
      const TwoPeriodFit fit =
          two_period_closed_form(p.quantities.col(0), p.quantities.col(1), p.values.col(0),
                                 p.values.col(1), VectorXd::Ones(6));
      CHECK(rel_err(fit.lambda, est.indices(1)) < 1e-12);
    }
  }

  SUBCASE("no overlap is an error") {
    VectorXd q1(2), q2(2), v1(2), v2(2);
    q1 << 1.0, 0.0;
    q2 << 0.0, 1.0;
    v1 << 2.0, 0.0;
    v2 << 0.0, 2.0;
    CHECK_THROWS_AS(two_period_closed_form(q1, q2, v1, v2, VectorXd::Ones(2)), Error);
  }
}
