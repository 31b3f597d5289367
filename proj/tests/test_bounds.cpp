#include <catch2/catch_amalgamated.hpp>

#include "unitselect/bounds.hpp"
#include "unitselect/oracle.hpp"
#include "test_util.hpp"

using namespace unitselect;

namespace {

ExperimentalData exp_probs(double p1, double p0) {
  ExperimentalData e;
  e.p_y_do_x = p1;
  e.p_y_do_xp = p0;
  return e;
}

ObservationalData obs_probs(double xy, double xyp, double xpy, double xpyp) {
  return ObservationalData{xy, xyp, xpy, xpyp, std::nullopt};
}

const BenefitVector kVaccine{1, -1, -1, -1};
const BenefitVector kNetGain{1, 0, 0, -1};

// Completion of the second vaccine group's observational data: P(x) = 5/18
// with P(y|x) = P(y|x') = 0.05, entered as the exact 360th cells.
const ObservationalData kVaccineObsC2 =
    obs_probs(5.0 / 360.0, 95.0 / 360.0, 13.0 / 360.0, 247.0 / 360.0);

}  // namespace

TEST_CASE("sigma is the payoff contrast over response types") {
  CHECK(sigma(kVaccine) == 2.0);
  CHECK(sigma(kNetGain) == 0.0);
  CHECK(sigma(BenefitVector{45000, -7000, 0, -50000}) == 2000.0);
}

TEST_CASE("w_term evaluates the marginal-only part") {
  CHECK(w_term(kVaccine, exp_probs(0.6, 0.3)) == -1.0);
  CHECK(w_term(kNetGain, exp_probs(0.6, 0.3)) == Catch::Approx(0.3).margin(1e-15));
  CHECK(w_term(BenefitVector{0, 0, 0, 0}, exp_probs(0.42, 0.17)) == 0.0);
}

TEST_CASE("complier bounds from experimental data alone") {
  const ComplierBounds a = complier_bounds(exp_probs(0.6, 0.3));
  CHECK(a.lower == Catch::Approx(0.3).margin(1e-15));
  CHECK(a.upper == Catch::Approx(0.6).margin(1e-15));

  const ComplierBounds b = complier_bounds(exp_probs(0.7, 0.3));
  CHECK(b.lower == Catch::Approx(0.4).margin(1e-15));
  CHECK(b.upper == Catch::Approx(0.7).margin(1e-15));

  const ComplierBounds c = complier_bounds(exp_probs(1.0, 0.0));
  CHECK(c.lower == 1.0);
  CHECK(c.upper == 1.0);
}

TEST_CASE("observational data tightens the complier envelope") {
  const ComplierBounds b = complier_bounds(exp_probs(0.7, 0.3), kVaccineObsC2);
  CHECK(b.lower == Catch::Approx(0.65).margin(1e-12));
  CHECK(b.upper == Catch::Approx(0.7).margin(1e-12));
}

TEST_CASE("complier_bounds throws on incompatible data") {
  CHECK_THROWS_AS(complier_bounds(exp_probs(0.0, 0.0), obs_probs(1, 0, 0, 0)), IncompatibleData);
  try {
    complier_bounds(exp_probs(0.0, 0.0), obs_probs(1, 0, 0, 0));
  } catch (const IncompatibleData& e) {
    CHECK(std::string(e.what()).find("exceeds") != std::string::npos);
  }
}

TEST_CASE("benefit bounds for the vaccine vector") {
  const BenefitBounds c1 = benefit_bounds(kVaccine, exp_probs(0.6, 0.3));
  CHECK(c1.lower == Catch::Approx(-0.4).margin(1e-12));
  CHECK(c1.upper == Catch::Approx(0.2).margin(1e-12));
  CHECK(midpoint_estimate(c1) == Catch::Approx(-0.1).margin(1e-12));
  CHECK_FALSE(c1.point_identified);

  const BenefitBounds c2 = benefit_bounds(kVaccine, exp_probs(0.7, 0.3), kVaccineObsC2);
  CHECK(c2.lower == Catch::Approx(0.3).margin(1e-12));
  CHECK(c2.upper == Catch::Approx(0.4).margin(1e-12));
  CHECK(midpoint_estimate(c2) == Catch::Approx(0.35).margin(1e-12));
}

TEST_CASE("zero-contrast vectors collapse to a point interval") {
  const BenefitBounds b = benefit_bounds(kNetGain, exp_probs(0.6, 0.3));
  CHECK(b.point_identified);
  CHECK(b.lower == b.upper);
  CHECK(b.lower == Catch::Approx(0.3).margin(1e-12));
  CHECK(b.lower == point_estimate(kNetGain, exp_probs(0.6, 0.3)).value);
}

TEST_CASE("negative contrast mirrors the interval") {
  const BenefitVector flipped{-1, 1, 1, 1};
  const BenefitBounds b = benefit_bounds(flipped, exp_probs(0.6, 0.3));
  CHECK(b.sigma == -2.0);
  CHECK(b.lower == Catch::Approx(-0.2).margin(1e-12));
  CHECK(b.upper == Catch::Approx(0.4).margin(1e-12));
}

TEST_CASE("gain equality holds exactly when the contrast vanishes") {
  CHECK(gain_equality_check(BenefitVector{45000, -5000, 0, -50000}));
  CHECK_FALSE(gain_equality_check(BenefitVector{45000, -7000, 0, -50000}));
  CHECK_FALSE(gain_equality_check(BenefitVector{2, -1, -1, -2}));
  CHECK(gain_equality_check(kNetGain));
  CHECK_FALSE(gain_equality_check(kVaccine));
}

TEST_CASE("point estimate matches the closed formula") {
  const PointEstimate a = point_estimate(BenefitVector{45000, -5000, 0, -50000},
                                         exp_probs(0.6, 0.3));
  CHECK(a.value == Catch::Approx(12000.0).margin(1e-9));
  CHECK_FALSE(a.assumption_required);

  CHECK(point_estimate(kNetGain, exp_probs(0.6, 0.3)).value ==
        Catch::Approx(0.3).margin(1e-12));
  CHECK(point_estimate(kNetGain, exp_probs(0.7, 0.3)).value ==
        Catch::Approx(0.4).margin(1e-12));

  // Without gain equality the value is only meaningful under monotonicity.
  CHECK(point_estimate(kVaccine, exp_probs(0.6, 0.3)).assumption_required);
}

TEST_CASE("midpoint estimator") {
  BenefitBounds b;
  b.lower = -0.4;
  b.upper = 0.2;
  CHECK(midpoint_estimate(b) == Catch::Approx(-0.1).margin(1e-15));
  b.lower = b.upper = 0.3;
  CHECK(midpoint_estimate(b) == 0.3);
}

namespace {

Study vaccine_study(const BenefitVector& bv) {
  Study s;
  s.benefit_vector = bv;
  GroupData c1;
  c1.id = "c1";
  c1.experimental = experimental_from_counts(750, 450, 750, 225);
  GroupData c2;
  c2.id = "c2";
  c2.experimental = experimental_from_counts(750, 525, 750, 225);
  c2.observational = observational_from_counts(5, 95, 13, 247);
  s.groups = {c1, c2};
  return s;
}

}  // namespace

TEST_CASE("rank_groups orders the vaccine study") {
  const auto ranked = rank_groups(vaccine_study(kVaccine), Estimator::midpoint);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].id == "c2");
  CHECK(ranked[0].estimate == Catch::Approx(0.35).margin(1e-12));
  CHECK(ranked[1].id == "c1");
  CHECK(ranked[1].estimate == Catch::Approx(-0.1).margin(1e-12));

  const auto net = rank_groups(vaccine_study(kNetGain), Estimator::midpoint);
  CHECK(net[0].id == "c2");
  CHECK(net[0].estimate == Catch::Approx(0.4).margin(1e-12));
  CHECK(net[1].estimate == Catch::Approx(0.3).margin(1e-12));
}

TEST_CASE("without observational data the second group only reaches 0.1") {
  Study s = vaccine_study(kVaccine);
  s.groups[1].observational.reset();
  const auto ranked = rank_groups(s, Estimator::midpoint);
  CHECK(ranked[0].id == "c2");
  CHECK(ranked[0].estimate == Catch::Approx(0.1).margin(1e-12));
  CHECK(ranked[0].bounds.lower == Catch::Approx(-0.2).margin(1e-12));
  CHECK(ranked[0].bounds.upper == Catch::Approx(0.4).margin(1e-12));
  CHECK(ranked[1].estimate == Catch::Approx(-0.1).margin(1e-12));

  const auto pessimist = rank_groups(s, Estimator::lower);
  CHECK(pessimist[0].estimate == pessimist[0].bounds.lower);
  const auto optimist = rank_groups(s, Estimator::upper);
  CHECK(optimist[0].estimate == optimist[0].bounds.upper);
}

TEST_CASE("rank_groups breaks ties by id and handles single groups") {
  Study s;
  s.benefit_vector = kNetGain;
  GroupData b;
  b.id = "b";
  b.experimental = experimental_from_counts(10, 6, 10, 3);
  GroupData a;
  a.id = "a";
  a.experimental = experimental_from_counts(20, 12, 20, 6);  // same ratios as b
  s.groups = {b, a};
  const auto ranked = rank_groups(s, Estimator::midpoint);
  CHECK(ranked[0].id == "a");
  CHECK(ranked[1].id == "b");

  s.groups = {a};
  CHECK(rank_groups(s, Estimator::upper).size() == 1);
}

TEST_CASE("rank_groups names the incompatible group") {
  Study s;
  s.benefit_vector = kVaccine;
  GroupData ok;
  ok.id = "fine";
  ok.experimental = experimental_from_counts(10, 6, 10, 3);
  GroupData bad;
  bad.id = "broken";
  bad.experimental = exp_probs(0.0, 0.0);
  bad.observational = obs_probs(1, 0, 0, 0);
  s.groups = {ok, bad};
  try {
    rank_groups(s);
    FAIL("expected IncompatibleData");
  } catch (const IncompatibleData& e) {
    CHECK(std::string(e.what()).find("broken") != std::string::npos);
  }
}

TEST_CASE("interval validity over random models and payoffs") {
  std::mt19937_64 rng(201);
  for (int i = 0; i < 500; ++i) {
    const GroundTruth g = testutil::random_ground_truth(rng);
    const BenefitVector bv = testutil::random_benefit_vector(rng);
    const ExperimentalData e = ground_truth_to_experimental(g);
    const bool with_obs = testutil::uniform(rng) < 0.5;
    const std::optional<ObservationalData> o =
        with_obs ? std::optional<ObservationalData>(ground_truth_to_observational(g))
                 : std::nullopt;
    const BenefitBounds b = benefit_bounds(bv, e, o);
    CHECK(b.lower <= b.upper + kBoundTol);
    CHECK(b.complier_lower >= -kBoundTol);
    CHECK(b.complier_upper <= 1.0 + kBoundTol);
  }
}

TEST_CASE("gain-equal vectors yield the point estimate for any data") {
  std::mt19937_64 rng(202);
  for (int i = 0; i < 500; ++i) {
    const GroundTruth g = testutil::random_ground_truth(rng);
    const BenefitVector bv = testutil::random_gain_equal_vector(rng);
    const ExperimentalData e = ground_truth_to_experimental(g);
    const BenefitBounds b = benefit_bounds(bv, e);
    CHECK(b.point_identified);
    CHECK(std::fabs(b.lower - point_estimate(bv, e).value) <= 1e-12);
  }
}

TEST_CASE("observational data can only tighten the envelope") {
  std::mt19937_64 rng(203);
  for (int i = 0; i < 500; ++i) {
    const GroundTruth g = testutil::random_ground_truth(rng);
    const ExperimentalData e = ground_truth_to_experimental(g);
    const ComplierBounds without = complier_bounds(e);
    const ComplierBounds with = complier_bounds(e, ground_truth_to_observational(g));
    CHECK(with.lower >= without.lower - kBoundTol);
    CHECK(with.upper <= without.upper + kBoundTol);
  }
}

TEST_CASE("positive scaling of payoffs scales bounds and keeps the ranking") {
  std::mt19937_64 rng(204);
  for (int i = 0; i < 100; ++i) {
    Study s;
    s.benefit_vector = testutil::random_benefit_vector(rng);
    for (int k = 0; k < 4; ++k) {
      const GroundTruth g = testutil::random_ground_truth(rng);
      GroupData gd;
      gd.id = "g" + std::to_string(k);
      gd.experimental = ground_truth_to_experimental(g);
      gd.observational = ground_truth_to_observational(g);
      s.groups.push_back(std::move(gd));
    }
    const double factor = testutil::uniform_in(rng, 0.1, 20.0);
    Study scaled = s;
    scaled.benefit_vector.complier *= factor;
    scaled.benefit_vector.always_taker *= factor;
    scaled.benefit_vector.never_taker *= factor;
    scaled.benefit_vector.defier *= factor;

    const auto base = rank_groups(s, Estimator::midpoint);
    const auto big = rank_groups(scaled, Estimator::midpoint);
    REQUIRE(base.size() == big.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
      CHECK(big[k].id == base[k].id);
      const double tol = 1e-12 * std::max(1.0, std::fabs(base[k].estimate) * factor);
      CHECK(std::fabs(big[k].estimate - factor * base[k].estimate) <= tol);
      CHECK(std::fabs(big[k].bounds.lower - factor * base[k].bounds.lower) <= tol);
      CHECK(std::fabs(big[k].bounds.upper - factor * base[k].bounds.upper) <= tol);
    }
  }
}
