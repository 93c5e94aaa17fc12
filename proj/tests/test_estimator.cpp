#include <cmath>
#include <complex>
#include <stdexcept>

#include <doctest.h>

#include "slelab/estimator.hpp"

using namespace slelab;

namespace {

Scenario basic_scenario() {
  Scenario s;
  s.kappa = kappa_params(8.0 / 3.0);
  s.points = {cplx(0, 1)};
  s.radii = {0.4};
  s.n_samples = 2000;
  s.dt = 1e-3;
  s.truncation_factor = 20.0;
  s.master_seed = 42;
  return s;
}

}  // namespace

TEST_CASE("validate_scenario preconditions") {
  auto s = basic_scenario();
  CHECK_NOTHROW(validate_scenario(s));

  auto bad = s;
  bad.radii = {10.0};  // r >= d_1 = 1
  CHECK_THROWS_AS(validate_scenario(bad), std::invalid_argument);

  bad = s;
  bad.points = {cplx(2, 0.1)};
  bad.radii = {0.5};  // r >= Im z
  CHECK_THROWS_AS(validate_scenario(bad), std::invalid_argument);

  bad = s;
  bad.kappa.kappa = 9.0;
  CHECK_THROWS_AS(validate_scenario(bad), std::invalid_argument);

  bad = s;
  bad.truncation_factor = 1.5;
  CHECK_THROWS_AS(validate_scenario(bad), std::invalid_argument);

  bad = s;
  bad.workers = 0;
  CHECK_THROWS_AS(validate_scenario(bad), std::invalid_argument);

  bad = s;
  bad.dt = 0.0;
  CHECK_THROWS_AS(validate_scenario(bad), std::invalid_argument);
}

TEST_CASE("degenerate zero-sample scenario is flagged, not NaN") {
  auto s = basic_scenario();
  s.n_samples = 0;
  auto est = estimate_visit_prob(s);
  CHECK_FALSE(est.unordered.defined);
  CHECK(est.unordered.n_samples == 0);
  CHECK(est.unordered.mean == 0.0);
}

TEST_CASE("one-point estimate sanity and stderr formula") {
  auto s = basic_scenario();
  auto est = estimate_visit_prob(s).unordered;
  CHECK(est.defined);
  CHECK(est.n_hits > 0);
  CHECK(est.mean > 0.0);
  CHECK(est.mean <= 1.0);
  const double p = est.mean;
  CHECK(est.stderr_ ==
        doctest::Approx(std::sqrt(p * (1 - p) / double(s.n_samples))).epsilon(1e-12));
}

TEST_CASE("ordered/unordered partition identity is exact") {
  auto s = basic_scenario();
  s.points = {cplx(0, 1), cplx(0.8, 1.2)};
  s.radii = {0.3, 0.3};
  s.n_samples = 1500;
  auto est = estimate_visit_prob(s);
  std::size_t total = 0;
  for (const auto& [perm, e] : est.per_permutation) {
    CHECK(perm.size() == 2);
    total += e.n_hits;
  }
  CHECK(total == est.unordered.n_hits);
  CHECK(est.unordered.n_hits > 0);
}

TEST_CASE("worker count does not change the counts") {
  auto s = basic_scenario();
  s.n_samples = 1200;
  std::vector<HitArm> arms = {HitArm{{0.4}, 200.0}, HitArm{{0.2}, 200.0}};

  s.workers = 1;
  auto c1 = run_hit_mc(s, arms);
  s.workers = 4;
  auto c4 = run_hit_mc(s, arms);
  s.workers = 8;
  auto c8 = run_hit_mc(s, arms);
  for (std::size_t a = 0; a < arms.size(); ++a) {
    CHECK(c1[a].all_hit == c4[a].all_hit);
    CHECK(c1[a].all_hit == c8[a].all_hit);
    CHECK(c1[a].per_perm == c4[a].per_perm);
    CHECK(c1[a].per_perm == c8[a].per_perm);
  }
}

TEST_CASE("monotonicity in r holds exactly under common random numbers") {
  auto s = basic_scenario();
  s.n_samples = 1500;
  auto counts = run_hit_mc(s, {HitArm{{0.45}, 200.0}, HitArm{{0.3}, 200.0},
                               HitArm{{0.15}, 200.0}});
  CHECK(counts[0].all_hit >= counts[1].all_hit);
  CHECK(counts[1].all_hit >= counts[2].all_hit);
  CHECK(counts[0].all_hit > 0);
}

TEST_CASE("longer horizon never loses hits (truncation monotone)") {
  auto s = basic_scenario();
  s.n_samples = 1000;
  auto counts = run_hit_mc(s, {HitArm{{0.4}, 50.0}, HitArm{{0.4}, 200.0}});
  CHECK(counts[1].all_hit >= counts[0].all_hit);
}

TEST_CASE("rescaled_green bookkeeping identity") {
  auto s = basic_scenario();
  s.n_samples = 800;
  auto raw = estimate_visit_prob(s).unordered;
  auto resc = rescaled_green(s);
  CHECK(resc.rescaled);
  const double factor = std::pow(0.4, s.kappa.d - 2.0);
  CHECK(resc.mean == doctest::Approx(raw.mean * factor).epsilon(1e-12));
  CHECK(resc.stderr_ == doctest::Approx(raw.stderr_ * factor).epsilon(1e-12));
}

TEST_CASE("convergence_sweep plumbing") {
  auto s = basic_scenario();
  s.n_samples = 800;

  auto single = convergence_sweep(s, {{0.4}});
  REQUIRE(single.size() == 1);
  auto direct = rescaled_green(s);
  CHECK(single[0].mean == doctest::Approx(direct.mean).epsilon(1e-12));
  CHECK(single[0].n_hits == direct.n_hits);

  auto table = convergence_sweep(s, {{0.4}, {0.2}});
  REQUIRE(table.size() == 2);
  CHECK(table[0].n_hits >= table[1].n_hits);

  CHECK_THROWS_AS(convergence_sweep(s, {}), std::invalid_argument);
  CHECK_THROWS_AS(convergence_sweep(s, {{0.2}, {0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(convergence_sweep(s, {{2.0}}), std::invalid_argument);
}

TEST_CASE("bound_ratio positive and flagged on zero hits") {
  auto s = basic_scenario();
  s.n_samples = 1000;
  auto br = bound_ratio(s);
  CHECK_FALSE(br.low_sample);
  CHECK(br.ratio > 0.0);
  CHECK(std::isfinite(br.ratio));
}

TEST_CASE("calibrate_c_hat positive; zero hits raise") {
  auto k = kappa_params(8.0 / 3.0);
  const double c = calibrate_c_hat(k, cplx(0, 1), 0.4, 1500, 1e-3, 7);
  CHECK(c > 0.0);
  CHECK(std::isfinite(c));

  CHECK_THROWS_AS(calibrate_c_hat(k, cplx(0, 1), 1e-7, 2, 1e-5, 7),
                  std::runtime_error);
  CHECK_THROWS_AS(calibrate_c_hat(k, cplx(0, 1), 2.0, 10, 1e-3, 7),
                  std::invalid_argument);
  CHECK_THROWS_AS(calibrate_c_hat(k, cplx(1, -1), 0.1, 10, 1e-3, 7),
                  std::invalid_argument);
}

TEST_CASE("rn_weight identities") {
  auto k = kappa_params(8.0 / 3.0);
  auto path = sample_driving(k, 1.0, 1e-3, 11);
  const cplx z(1, 1);

  // stop radius at or above Im z: tau = 0, M_0/G(z) = 1 exactly
  CHECK(rn_weight(path, z, 1.2, k, 1.0) == 1.0);
  CHECK(rn_weight(path, z, 1.2, k, 99.0) == 1.0);

  // c_hat cancels along nontrivial paths too
  const double w1 = rn_weight(path, z, 0.3, k, 1.0);
  const double w2 = rn_weight(path, z, 0.3, k, 123.0);
  CHECK(w1 == w2);
  CHECK(w1 >= 0.0);

  CHECK_THROWS_AS(rn_weight(path, z, 2.0, k, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rn_weight(path, z, 0.0, k, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rn_weight(path, cplx(1, -1), 0.1, k, 1.0), std::invalid_argument);
}

TEST_CASE("martingale_test basics") {
  auto k = kappa_params(8.0 / 3.0);
  const cplx z(1, 1);

  auto at_zero = martingale_test(k, 1.0, z, {0.0}, 200, 1e-3, 5);
  REQUIRE(at_zero.size() == 1);
  CHECK(at_zero[0].mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at_zero[0].stderr_ == doctest::Approx(0.0));

  auto a = martingale_test(k, 1.0, z, {0.05, 0.1}, 400, 1e-3, 5);
  auto b = martingale_test(k, 77.0, z, {0.05, 0.1}, 400, 1e-3, 5);
  REQUIRE(a.size() == 2);
  CHECK(a[0].mean == b[0].mean);
  CHECK(a[1].mean == b[1].mean);
  // loose sanity band; the tight band is an acceptance criterion
  CHECK(std::fabs(a[0].mean - 1.0) < 0.2);

  CHECK_THROWS_AS(martingale_test(k, 1.0, z, {0.2, 0.1}, 10, 1e-3, 5),
                  std::invalid_argument);
}

TEST_CASE("ghat_two_point preconditions and sanity") {
  auto k = kappa_params(8.0 / 3.0);
  CHECK_THROWS_AS(ghat_two_point(k, 1.0, cplx(0, 1), cplx(0, 1), 0.05, 10, 1e-3, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(ghat_two_point(k, 1.0, cplx(0, 1), cplx(0, 2), 5.0, 10, 1e-3, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(ghat_two_point(k, 1.0, cplx(1, -1), cplx(0, 2), 0.05, 10, 1e-3, 3),
                  std::invalid_argument);

  auto e = ghat_two_point(k, 1.0, cplx(0, 1), cplx(0, 2), 0.1, 400, 1e-3, 3);
  CHECK(e.defined);
  CHECK(e.mean > 0.0);
  CHECK(e.n_hits > 0);
  CHECK(e.n_hits <= e.n_samples);
}

TEST_CASE("adaptive and uniform stepping agree statistically") {
  auto s = basic_scenario();
  s.truncation_factor = 2.0;  // short horizon keeps the uniform arm cheap
  s.n_samples = 1500;
  s.adaptive = true;
  auto ea = estimate_visit_prob(s).unordered;
  s.adaptive = false;
  auto eu = estimate_visit_prob(s).unordered;
  const double sigma = std::hypot(ea.stderr_, eu.stderr_);
  CHECK(std::fabs(ea.mean - eu.mean) < 4.0 * sigma + 0.02);
}

TEST_CASE("scaling_check returns comparable estimates") {
  auto s = basic_scenario();
  s.radii = {0.3};
  s.n_samples = 1500;
  auto [base, scaled] = scaling_check(s, 2.0);
  CHECK(base.defined);
  CHECK(scaled.defined);
  const double sigma = std::hypot(base.stderr_, scaled.stderr_);
  CHECK(std::fabs(base.mean - scaled.mean) < 5.0 * sigma + 0.02);

  CHECK_THROWS_AS(scaling_check(s, 0.0), std::invalid_argument);
}
