// unitselect: counterfactual unit-selection analysis from the command line.
//
//   bounds    rank groups by the bounded per-unit benefit
//   compare   audit an A/B-test score against the benefit bounds
//   simulate  draw a seeded finite-sample study from ground-truth models
//   verify    cross-check closed-form bounds against the grid oracle
//
// Exit codes: 0 success, 1 input error (I/O, schema, invalid data),
// 2 analytic failure (incompatible data or verification FAIL).

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unitselect/bounds.hpp"
#include "unitselect/heuristics.hpp"
#include "unitselect/io.hpp"
#include "unitselect/report.hpp"
#include "unitselect/simulate.hpp"

namespace {

using unitselect::json;

std::vector<double> parse_number_list(const std::string& text, std::size_t expected,
                                      const std::string& flag) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string piece =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw unitselect::ValidationError(flag + ": cannot parse number '" + piece + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.size() != expected) {
    throw unitselect::ValidationError(flag + ": expected " + std::to_string(expected) +
                                      " comma-separated numbers");
  }
  return values;
}

void emit(const json& doc, const std::string& format, const auto& report) {
  if (format == "json") {
    std::cout << doc.dump(2) << '\n';
  } else {
    unitselect::render_table(report, std::cout);
  }
}

int run_bounds(const std::string& input, const std::string& estimator_name,
               const std::string& format) {
  const auto estimator = unitselect::estimator_from_string(estimator_name);
  if (!estimator) throw unitselect::ValidationError("unknown estimator '" + estimator_name + "'");
  const unitselect::Study study = unitselect::load_study(input);
  const unitselect::BoundsReport report = unitselect::make_bounds_report(study, *estimator);
  emit(unitselect::to_json(report), format, report);
  if (report.incompatible_count > 0) {
    std::cerr << "unitselect: " << report.incompatible_count
              << " group(s) have incompatible data\n";
    return 2;
  }
  return 0;
}

int run_compare(const std::string& input, const std::string& ab_text, const std::string& format) {
  const std::vector<double> ab = parse_number_list(ab_text, 2, "--ab");
  const unitselect::ABHeuristic heuristic{ab[0], ab[1]};
  const unitselect::Study study = unitselect::load_study(input);
  const unitselect::CompareReport report = unitselect::make_compare_report(study, heuristic);
  emit(unitselect::to_json(report), format, report);
  if (report.incompatible_count > 0) {
    std::cerr << "unitselect: " << report.incompatible_count
              << " group(s) have incompatible data\n";
    return 2;
  }
  return 0;
}

int run_simulate(const std::string& truth_path, std::int64_t n_per_arm, std::int64_t n_obs,
                 std::uint64_t seed, bool exact, int workers, const std::string& benefit_text,
                 const std::string& out_path) {
  const unitselect::TruthDocument doc = unitselect::load_truth(truth_path);

  unitselect::BenefitVector bv{1.0, 0.0, 0.0, -1.0};  // net-compliers-gained default
  if (!benefit_text.empty()) {
    const std::vector<double> v = parse_number_list(benefit_text, 4, "--benefit");
    bv = unitselect::BenefitVector{v[0], v[1], v[2], v[3]};
  } else if (doc.benefit_vector) {
    bv = *doc.benefit_vector;
  }

  unitselect::SimulationConfig cfg;
  cfg.n_per_arm = n_per_arm;
  cfg.n_observational = n_obs;
  cfg.seed = seed;
  cfg.groups = doc.groups;

  unitselect::StudyGenOptions options;
  options.exact_expectations = exact;
  options.workers = workers;

  const unitselect::Study study = unitselect::generate_study(cfg, bv, options);
  const std::vector<std::string> incompatible = unitselect::incompatible_group_ids(study);

  json metadata;
  metadata["generator"] = unitselect::kGeneratorId;
  metadata["seed"] = seed;
  metadata["n_per_arm"] = n_per_arm;
  metadata["n_observational"] = n_obs;
  metadata["mode"] = exact ? "expected" : "sampled";
  if (!incompatible.empty()) metadata["incompatible_groups"] = incompatible;

  unitselect::write_json_file(unitselect::study_to_json(study, metadata), out_path);

  std::cerr << "unitselect: wrote " << out_path << " (" << study.groups.size() << " group(s), "
            << (exact ? "expected counts" : "sampled") << ", seed " << seed << ")\n";
  for (const std::string& id : incompatible) {
    std::cerr << "unitselect: group '" << id << "' sampled incompatible data (flagged in metadata)\n";
  }
  return 0;
}

int run_verify(const std::string& input, double grid_step, const std::string& format) {
  const unitselect::Study study = unitselect::load_study(input);
  const unitselect::VerifyReport report = unitselect::make_verify_report(study, grid_step);
  emit(unitselect::to_json(report), format, report);
  return report.all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterfactual unit selection: tight benefit bounds from experimental and "
               "observational data"};
  app.require_subcommand(1);

  const auto format_check = CLI::IsMember({"table", "json"});

  std::string bounds_input;
  std::string bounds_estimator = "midpoint";
  std::string bounds_format = "table";
  CLI::App* bounds_cmd = app.add_subcommand("bounds", "Rank groups by bounded benefit");
  bounds_cmd->add_option("--input", bounds_input, "study JSON file")->required();
  bounds_cmd->add_option("--estimator", bounds_estimator, "midpoint, lower, or upper")
      ->check(CLI::IsMember({"midpoint", "lower", "upper"}));
  bounds_cmd->add_option("--format", bounds_format, "table or json")
      ->envname("UNITSELECT_FORMAT")
      ->check(format_check);

  std::string compare_input;
  std::string compare_ab;
  std::string compare_format = "table";
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Audit an A/B heuristic a,b against the benefit bounds");
  compare_cmd->add_option("--input", compare_input, "study JSON file")->required();
  compare_cmd->add_option("--ab", compare_ab, "heuristic weights A,B")->required();
  compare_cmd->add_option("--format", compare_format, "table or json")
      ->envname("UNITSELECT_FORMAT")
      ->check(format_check);

  std::string sim_truth;
  std::string sim_out;
  std::string sim_benefit;
  std::int64_t sim_n_per_arm = 0;
  std::int64_t sim_n_obs = 0;
  std::uint64_t sim_seed = 0;
  bool sim_exact = false;
  int sim_workers = 1;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Generate a seeded study from ground-truth models");
  simulate_cmd->add_option("--truth", sim_truth, "ground-truth JSON file")->required();
  simulate_cmd->add_option("--n-per-arm", sim_n_per_arm, "units per experimental arm")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--n-obs", sim_n_obs, "observational sample size (0 = none)")
      ->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--seed", sim_seed, "random seed");
  simulate_cmd->add_flag("--exact", sim_exact, "emit rounded expected counts instead of draws");
  simulate_cmd->add_option("--workers", sim_workers, "worker threads (output is identical)")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--benefit", sim_benefit,
                           "benefit vector complier,always_taker,never_taker,defier");
  simulate_cmd->add_option("--out", sim_out, "output study JSON file")->required();

  std::string verify_input;
  std::string verify_format = "table";
  double verify_grid_step = 0.05;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Cross-check closed-form bounds against the grid oracle");
  verify_cmd->add_option("--input", verify_input, "study JSON file")->required();
  verify_cmd->add_option("--grid-step", verify_grid_step, "simplex grid resolution, in (0, 0.1]");
  verify_cmd->add_option("--format", verify_format, "table or json")
      ->envname("UNITSELECT_FORMAT")
      ->check(format_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (bounds_cmd->parsed()) return run_bounds(bounds_input, bounds_estimator, bounds_format);
    if (compare_cmd->parsed()) return run_compare(compare_input, compare_ab, compare_format);
    if (simulate_cmd->parsed()) {
      return run_simulate(sim_truth, sim_n_per_arm, sim_n_obs, sim_seed, sim_exact, sim_workers,
                          sim_benefit, sim_out);
    }
    if (verify_cmd->parsed()) return run_verify(verify_input, verify_grid_step, verify_format);
  } catch (const unitselect::IncompatibleData& e) {
    std::cerr << "unitselect: incompatible data: " << e.what() << '\n';
    return 2;
  } catch (const unitselect::NoFeasiblePoint& e) {
    std::cerr << "unitselect: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unitselect: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
