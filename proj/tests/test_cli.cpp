#include <catch2/catch_amalgamated.hpp>

#include "unitselect/bounds.hpp"
#include "unitselect/io.hpp"
#include "unitselect/report.hpp"
#include "test_util.hpp"

using namespace unitselect;
using testutil::run_command;

namespace {

std::string q(const std::string& s) { return "'" + s + "'"; }

std::string cli() { return q(testutil::cli_path()); }

const std::string kVaccineStudy = testutil::data_file("vaccine_study.json");
const std::string kVaccineTruth = testutil::data_file("vaccine_truth.json");

}  // namespace

TEST_CASE("bounds --format json matches the in-process report bit for bit") {
  const auto res = run_command(cli() + " bounds --input " + q(kVaccineStudy) +
                               " --format json 2>/dev/null");
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.output);

  const Study study = load_study(kVaccineStudy);
  const BoundsReport report = make_bounds_report(study, Estimator::midpoint);

  REQUIRE(out.at("groups").size() == report.rows.size());
  CHECK(out.at("gain_equality").get<bool>() == report.gain_equality);
  CHECK(out.at("ab_heuristic").is_null());
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const json& node = out.at("groups")[i];
    const GroupBoundsRow& row = report.rows[i];
    CHECK(node.at("id").get<std::string>() == row.id);
    CHECK(node.at("sigma").get<double>() == row.bounds.sigma);
    CHECK(node.at("w").get<double>() == row.bounds.w);
    CHECK(node.at("complier_lower").get<double>() == row.bounds.complier_lower);
    CHECK(node.at("complier_upper").get<double>() == row.bounds.complier_upper);
    CHECK(node.at("lower").get<double>() == row.bounds.lower);
    CHECK(node.at("upper").get<double>() == row.bounds.upper);
    CHECK(node.at("estimate").get<double>() == row.estimate);
  }

  // Ranking on the vaccine data puts c2 first.
  CHECK(out.at("groups")[0].at("id").get<std::string>() == "c2");
  CHECK(out.at("groups")[0].at("estimate").get<double>() == Catch::Approx(0.35).margin(1e-12));
  CHECK(out.at("groups")[1].at("estimate").get<double>() == Catch::Approx(-0.1).margin(1e-12));
}

TEST_CASE("bounds table format renders from the same report") {
  const auto res =
      run_command(cli() + " bounds --input " + q(kVaccineStudy) + " 2>/dev/null");
  REQUIRE(res.exit_code == 0);
  CHECK(res.output.find("estimator=midpoint") != std::string::npos);
  CHECK(res.output.find("c2") != std::string::npos);
  CHECK(res.output.find("0.35") != std::string::npos);
}

TEST_CASE("UNITSELECT_FORMAT env var sets the default format") {
  const auto res = run_command("UNITSELECT_FORMAT=json " + cli() + " bounds --input " +
                               q(kVaccineStudy) + " 2>/dev/null");
  REQUIRE(res.exit_code == 0);
  CHECK_NOTHROW(json::parse(res.output));
  // Explicit flag beats the environment.
  const auto table = run_command("UNITSELECT_FORMAT=json " + cli() + " bounds --input " +
                                 q(kVaccineStudy) + " --format table 2>/dev/null");
  CHECK(table.output.find("rank") != std::string::npos);
}

TEST_CASE("bounds --estimator switches the ranking score") {
  const auto res = run_command(cli() + " bounds --input " + q(kVaccineStudy) +
                               " --estimator lower --format json 2>/dev/null");
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.output);
  CHECK(out.at("estimator").get<std::string>() == "lower");
  CHECK(out.at("groups")[0].at("estimate").get<double>() ==
        out.at("groups")[0].at("lower").get<double>());
}

TEST_CASE("compare --ab 1,1 flags the vaccine disagreement") {
  const auto res = run_command(cli() + " compare --input " + q(kVaccineStudy) +
                               " --ab 1,1 --format json 2>/dev/null");
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.output);
  CHECK(out.at("disagreement_count").get<int>() == 1);
  REQUIRE(out.at("groups").size() == 2);
  const json& c1 = out.at("groups")[0];
  CHECK(c1.at("id").get<std::string>() == "c1");
  CHECK(c1.at("heuristic_value").get<double>() == Catch::Approx(0.3).margin(1e-12));
  CHECK(c1.at("heuristic_treat").get<bool>());
  CHECK_FALSE(c1.at("benefit_treat").get<bool>());
  CHECK(c1.at("disagreement").get<bool>());
  const json& c2 = out.at("groups")[1];
  CHECK(c2.at("heuristic_treat").get<bool>());
  CHECK(c2.at("benefit_treat").get<bool>());
  CHECK_FALSE(c2.at("disagreement").get<bool>());
}

TEST_CASE("compare with a matching gain-equal heuristic never disagrees") {
  testutil::TempDir tmp;
  Study s = load_study(kVaccineStudy);
  s.benefit_vector = {1, 0, 0, -1};
  write_json_file(study_to_json(s), tmp.file("net.json"));
  const auto res = run_command(cli() + " compare --input " + q(tmp.file("net.json")) +
                               " --ab 1,1 --format json 2>/dev/null");
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.output);
  CHECK(out.at("disagreement_count").get<int>() == 0);
}

TEST_CASE("simulate --exact reproduces the idealized counts and is stable") {
  testutil::TempDir tmp;
  const std::string out_path = tmp.file("study.json");
  const auto res = run_command(cli() + " simulate --truth " + q(kVaccineTruth) +
                               " --n-per-arm 750 --exact --out " + q(out_path) +
                               " 2>/dev/null && cat " + q(out_path));
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.output);
  const json& c1 = out.at("groups")[0].at("experimental").at("counts");
  CHECK(c1.at("treated_y").get<std::int64_t>() == 450);
  CHECK(c1.at("control_y").get<std::int64_t>() == 225);
  const json& c2 = out.at("groups")[1].at("experimental").at("counts");
  CHECK(c2.at("treated_y").get<std::int64_t>() == 525);
  CHECK(c2.at("control_y").get<std::int64_t>() == 225);
  CHECK(out.at("metadata").at("mode").get<std::string>() == "expected");
  CHECK_FALSE(out.at("groups")[0].contains("observational"));
}

TEST_CASE("simulate seeds are reproducible byte for byte") {
  testutil::TempDir tmp;
  const std::string a = tmp.file("a.json");
  const std::string b = tmp.file("b.json");
  const std::string base = cli() + " simulate --truth " + q(kVaccineTruth) +
                           " --n-per-arm 750 --n-obs 400 --seed 7 --out ";
  REQUIRE(run_command(base + q(a) + " 2>/dev/null").exit_code == 0);
  REQUIRE(run_command(base + q(b) + " --workers 4 2>/dev/null").exit_code == 0);
  const std::string bytes_a = testutil::read_file(a);
  REQUIRE_FALSE(bytes_a.empty());
  CHECK(bytes_a == testutil::read_file(b));

  // A simulated file feeds straight back into bounds.
  const auto bounds = run_command(cli() + " bounds --input " + q(a) +
                                  " --format json 2>/dev/null");
  CHECK(bounds.exit_code == 0);
}

TEST_CASE("simulate --benefit overrides the truth-file vector") {
  testutil::TempDir tmp;
  const std::string out_path = tmp.file("study.json");
  REQUIRE(run_command(cli() + " simulate --truth " + q(kVaccineTruth) +
                      " --n-per-arm 10 --benefit 2,-1,-1,-2 --out " + q(out_path) +
                      " 2>/dev/null")
              .exit_code == 0);
  const Study s = load_study(out_path);
  CHECK(s.benefit_vector.complier == 2.0);
  CHECK(s.benefit_vector.defier == -2.0);
}

TEST_CASE("verify passes on the vaccine study") {
  const auto res = run_command(cli() + " verify --input " + q(kVaccineStudy) +
                               " --grid-step 0.05 --format json 2>/dev/null");
  REQUIRE(res.exit_code == 0);
  const json out = json::parse(res.output);
  CHECK(out.at("all_pass").get<bool>());
  for (const json& g : out.at("groups")) {
    CHECK(g.at("pass").get<bool>());
    CHECK(g.at("n_feasible").get<std::int64_t>() > 0);
  }
}

TEST_CASE("incompatible study files exit with code 2 but still report") {
  testutil::TempDir tmp;
  const std::string path = tmp.file("broken.json");
  testutil::write_file(path, R"({
    "benefit_vector": {"complier": 1, "always_taker": -1, "never_taker": -1, "defier": -1},
    "groups": [
      {"id": "fine",
       "experimental": {"probabilities": {"p_y_do_x": 0.6, "p_y_do_xp": 0.3}}},
      {"id": "broken",
       "experimental": {"probabilities": {"p_y_do_x": 0.9, "p_y_do_xp": 0.8}},
       "observational": {"probabilities": {"xy": 0.05, "xyp": 0.9, "xpy": 0.0, "xpyp": 0.05}}}
    ]
  })");
  const auto res = run_command(cli() + " bounds --input " + q(path) + " --format json 2>/dev/null");
  CHECK(res.exit_code == 2);
  const json out = json::parse(res.output);
  CHECK(out.at("incompatible_count").get<int>() == 1);
  bool found = false;
  for (const json& g : out.at("groups")) {
    if (g.at("id").get<std::string>() == "broken") {
      found = true;
      CHECK_FALSE(g.at("compatible").get<bool>());
      CHECK_FALSE(g.at("violations").empty());
    }
  }
  CHECK(found);

  const auto verify = run_command(cli() + " verify --input " + q(path) + " 2>/dev/null");
  CHECK(verify.exit_code == 2);
}

TEST_CASE("input errors exit with code 1") {
  const auto missing = run_command(cli() + " bounds --input /nonexistent.json 2>/dev/null");
  CHECK(missing.exit_code == 1);

  testutil::TempDir tmp;
  testutil::write_file(tmp.file("bad.json"), R"({"groups": []})");
  const auto bad = run_command(cli() + " bounds --input " + q(tmp.file("bad.json")) +
                               " 2>&1 >/dev/null");
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("benefit_vector") != std::string::npos);

  const auto flag = run_command(cli() + " bounds --input " + q(kVaccineStudy) +
                                " --estimator median 2>/dev/null");
  CHECK(flag.exit_code == 1);

  const auto ab = run_command(cli() + " compare --input " + q(kVaccineStudy) +
                              " --ab nope 2>/dev/null");
  CHECK(ab.exit_code == 1);
}
