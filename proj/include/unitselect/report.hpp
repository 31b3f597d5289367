#pragma once

// Report objects for the command-line front end. Each command builds one
// report struct; the table and JSON renderers both read from it, so the two
// output formats can never drift apart numerically.

#include <iomanip>
#include <ostream>

#include "unitselect/bounds.hpp"
#include "unitselect/heuristics.hpp"
#include "unitselect/io.hpp"
#include "unitselect/oracle.hpp"

namespace unitselect {

struct GroupBoundsRow {
  std::string id;
  ExperimentalData experimental;
  bool has_observational = false;
  bool compatible = true;
  std::vector<std::string> violations;
  BenefitBounds bounds;  // meaningful only when compatible
  double estimate = 0.0;
  PointEstimate point;
};

struct BoundsReport {
  BenefitVector benefit_vector;
  Estimator estimator = Estimator::midpoint;
  bool gain_equality = false;
  std::optional<ABHeuristic> ab_form;
  std::vector<GroupBoundsRow> rows;  // ranked; incompatible rows last, in input order
  int incompatible_count = 0;
};

inline BoundsReport make_bounds_report(const Study& study,
                                       Estimator estimator = Estimator::midpoint) {
  study.validate();
  BoundsReport report;
  report.benefit_vector = study.benefit_vector;
  report.estimator = estimator;
  report.gain_equality = gain_equality_check(study.benefit_vector);
  report.ab_form = ab_representation(study.benefit_vector);

  std::vector<GroupBoundsRow> ranked;
  std::vector<GroupBoundsRow> flagged;
  for (const GroupData& g : study.groups) {
    GroupBoundsRow row;
    row.id = g.id;
    row.experimental = g.experimental;
    row.has_observational = g.observational.has_value();
    row.point = point_estimate(study.benefit_vector, g.experimental);
    const CompatibilityReport compat = check_compatibility(g.experimental, g.observational);
    row.compatible = compat.compatible;
    row.violations = compat.violations;
    if (row.compatible) {
      row.bounds = benefit_bounds(study.benefit_vector, g.experimental, g.observational);
      row.estimate = estimate_of(row.bounds, estimator);
      ranked.push_back(std::move(row));
    } else {
      ++report.incompatible_count;
      flagged.push_back(std::move(row));
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const GroupBoundsRow& a, const GroupBoundsRow& b) {
    if (a.estimate != b.estimate) return a.estimate > b.estimate;
    return a.id < b.id;
  });
  report.rows = std::move(ranked);
  for (GroupBoundsRow& row : flagged) report.rows.push_back(std::move(row));
  return report;
}

struct CompareRow {
  std::string id;
  bool compatible = true;
  std::vector<std::string> violations;
  double heuristic_value = 0.0;
  bool heuristic_treat = false;
  BenefitBounds bounds;  // meaningful only when compatible
  double benefit_estimate = 0.0;
  bool benefit_treat = false;
  bool disagreement = false;
};

struct CompareReport {
  ABHeuristic heuristic;
  BenefitVector benefit_vector;
  std::vector<CompareRow> rows;  // input order
  int disagreement_count = 0;
  int incompatible_count = 0;
};

// Decision rule on both sides: treat when the score is strictly positive.
// The benefit side decides on the midpoint estimate.
inline CompareReport make_compare_report(const Study& study, const ABHeuristic& heuristic) {
  study.validate();
  heuristic.validate();
  CompareReport report;
  report.heuristic = heuristic;
  report.benefit_vector = study.benefit_vector;
  for (const GroupData& g : study.groups) {
    CompareRow row;
    row.id = g.id;
    row.heuristic_value = heuristic.evaluate(g.experimental);
    row.heuristic_treat = row.heuristic_value > 0.0;
    const CompatibilityReport compat = check_compatibility(g.experimental, g.observational);
    row.compatible = compat.compatible;
    row.violations = compat.violations;
    if (row.compatible) {
      row.bounds = benefit_bounds(study.benefit_vector, g.experimental, g.observational);
      row.benefit_estimate = midpoint_estimate(row.bounds);
      row.benefit_treat = row.benefit_estimate > 0.0;
      row.disagreement = row.heuristic_treat != row.benefit_treat;
      if (row.disagreement) ++report.disagreement_count;
    } else {
      ++report.incompatible_count;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

struct VerifyRow {
  std::string id;
  bool ok = false;     // both routes evaluated
  std::string error;   // set when not ok
  BenefitBounds bounds;
  BruteForceRange brute;
  double max_deviation = 0.0;
  bool pass = false;
};

struct VerifyReport {
  BenefitVector benefit_vector;
  double grid_step = 0.05;
  double tolerance = 0.0;
  std::vector<VerifyRow> rows;  // input order
  bool all_pass = true;
};

// Runs the grid oracle against the closed-form bounds for every group.
inline VerifyReport make_verify_report(const Study& study, double grid_step) {
  study.validate();
  VerifyReport report;
  report.benefit_vector = study.benefit_vector;
  report.grid_step = grid_step;
  report.tolerance = 2.0 * grid_step * study.benefit_vector.magnitude();
  for (const GroupData& g : study.groups) {
    VerifyRow row;
    row.id = g.id;
    try {
      row.bounds = benefit_bounds(study.benefit_vector, g.experimental, g.observational);
      row.brute =
          brute_force_benefit_range(study.benefit_vector, g.experimental, g.observational,
                                    grid_step);
      row.max_deviation = std::max(std::fabs(row.brute.min - row.bounds.lower),
                                   std::fabs(row.brute.max - row.bounds.upper));
      row.ok = true;
      row.pass = row.max_deviation <= report.tolerance;
    } catch (const IncompatibleData& e) {
      row.error = e.what();
    } catch (const NoFeasiblePoint& e) {
      row.error = e.what();
    }
    if (!row.pass) report.all_pass = false;
    report.rows.push_back(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON rendering

inline json bounds_row_json(const GroupBoundsRow& row) {
  json node;
  node["id"] = row.id;
  node["compatible"] = row.compatible;
  node["experimental"] = json{{"p_y_do_x", row.experimental.p_y_do_x},
                              {"p_y_do_xp", row.experimental.p_y_do_xp}};
  node["has_observational"] = row.has_observational;
  if (row.compatible) {
    node["sigma"] = row.bounds.sigma;
    node["w"] = row.bounds.w;
    node["complier_lower"] = row.bounds.complier_lower;
    node["complier_upper"] = row.bounds.complier_upper;
    node["lower"] = row.bounds.lower;
    node["upper"] = row.bounds.upper;
    node["estimate"] = row.estimate;
    node["point_identified"] = row.bounds.point_identified;
  }
  node["point_estimate"] =
      json{{"value", row.point.value}, {"assumption_required", row.point.assumption_required}};
  if (!row.violations.empty()) node["violations"] = row.violations;
  return node;
}

inline json to_json(const BoundsReport& report) {
  json root;
  root["command"] = "bounds";
  root["estimator"] = to_string(report.estimator);
  root["benefit_vector"] = benefit_vector_to_json(report.benefit_vector);
  root["gain_equality"] = report.gain_equality;
  root["ab_heuristic"] =
      report.ab_form ? json{{"a", report.ab_form->a}, {"b", report.ab_form->b}} : json(nullptr);
  root["incompatible_count"] = report.incompatible_count;
  root["groups"] = json::array();
  for (const GroupBoundsRow& row : report.rows) root["groups"].push_back(bounds_row_json(row));
  return root;
}

inline json to_json(const CompareReport& report) {
  json root;
  root["command"] = "compare";
  root["heuristic"] = json{{"a", report.heuristic.a}, {"b", report.heuristic.b}};
  root["benefit_vector"] = benefit_vector_to_json(report.benefit_vector);
  root["disagreement_count"] = report.disagreement_count;
  root["incompatible_count"] = report.incompatible_count;
  root["groups"] = json::array();
  for (const CompareRow& row : report.rows) {
    json node;
    node["id"] = row.id;
    node["compatible"] = row.compatible;
    node["heuristic_value"] = row.heuristic_value;
    node["heuristic_treat"] = row.heuristic_treat;
    if (row.compatible) {
      node["lower"] = row.bounds.lower;
      node["upper"] = row.bounds.upper;
      node["benefit_estimate"] = row.benefit_estimate;
      node["benefit_treat"] = row.benefit_treat;
      node["disagreement"] = row.disagreement;
    }
    if (!row.violations.empty()) node["violations"] = row.violations;
    root["groups"].push_back(std::move(node));
  }
  return root;
}

inline json to_json(const VerifyReport& report) {
  json root;
  root["command"] = "verify";
  root["benefit_vector"] = benefit_vector_to_json(report.benefit_vector);
  root["grid_step"] = report.grid_step;
  root["tolerance"] = report.tolerance;
  root["all_pass"] = report.all_pass;
  root["groups"] = json::array();
  for (const VerifyRow& row : report.rows) {
    json node;
    node["id"] = row.id;
    if (row.ok) {
      node["lower"] = row.bounds.lower;
      node["upper"] = row.bounds.upper;
      node["brute_min"] = row.brute.min;
      node["brute_max"] = row.brute.max;
      node["n_feasible"] = row.brute.n_feasible;
      node["max_deviation"] = row.max_deviation;
      node["pass"] = row.pass;
    } else {
      node["error"] = row.error;
      node["pass"] = false;
    }
    root["groups"].push_back(std::move(node));
  }
  return root;
}

// ---------------------------------------------------------------------------
// Table rendering

namespace detail {

inline std::string cell(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

inline void print_benefit_vector(const BenefitVector& bv, std::ostream& os) {
  os << "benefit vector: complier=" << cell(bv.complier)
     << " always_taker=" << cell(bv.always_taker) << " never_taker=" << cell(bv.never_taker)
     << " defier=" << cell(bv.defier) << '\n';
}

}  // namespace detail

inline void render_table(const BoundsReport& report, std::ostream& os) {
  detail::print_benefit_vector(report.benefit_vector, os);
  os << "estimator=" << to_string(report.estimator)
     << "  gain_equality=" << (report.gain_equality ? "yes" : "no") << "  ab_heuristic=";
  if (report.ab_form) {
    os << "a=" << detail::cell(report.ab_form->a) << ",b=" << detail::cell(report.ab_form->b);
  } else {
    os << "none";
  }
  os << '\n' << '\n';
  os << std::left << std::setw(6) << "rank" << std::setw(12) << "group" << std::right
     << std::setw(12) << "estimate" << std::setw(12) << "lower" << std::setw(12) << "upper"
     << std::setw(12) << "sigma" << std::setw(12) << "W" << std::setw(10) << "L" << std::setw(10)
     << "U" << "  notes" << '\n';
  int rank = 1;
  for (const GroupBoundsRow& row : report.rows) {
    if (row.compatible) {
      os << std::left << std::setw(6) << rank++ << std::setw(12) << row.id << std::right
         << std::setw(12) << detail::cell(row.estimate) << std::setw(12)
         << detail::cell(row.bounds.lower) << std::setw(12) << detail::cell(row.bounds.upper)
         << std::setw(12) << detail::cell(row.bounds.sigma) << std::setw(12)
         << detail::cell(row.bounds.w) << std::setw(10) << detail::cell(row.bounds.complier_lower)
         << std::setw(10) << detail::cell(row.bounds.complier_upper) << "  "
         << (row.bounds.point_identified ? "point" : "") << '\n';
    } else {
      os << std::left << std::setw(6) << "-" << std::setw(12) << row.id
         << "  INCOMPATIBLE DATA" << '\n';
      for (const std::string& v : row.violations) os << "        " << v << '\n';
    }
  }
}

inline void render_table(const CompareReport& report, std::ostream& os) {
  detail::print_benefit_vector(report.benefit_vector, os);
  os << "heuristic: a=" << detail::cell(report.heuristic.a)
     << " b=" << detail::cell(report.heuristic.b) << '\n'
     << '\n';
  os << std::left << std::setw(12) << "group" << std::right << std::setw(12) << "heuristic"
     << std::setw(10) << "decision" << std::setw(12) << "benefit" << std::setw(10) << "decision"
     << "  flag" << '\n';
  for (const CompareRow& row : report.rows) {
    os << std::left << std::setw(12) << row.id << std::right << std::setw(12)
       << detail::cell(row.heuristic_value) << std::setw(10)
       << (row.heuristic_treat ? "treat" : "skip");
    if (row.compatible) {
      os << std::setw(12) << detail::cell(row.benefit_estimate) << std::setw(10)
         << (row.benefit_treat ? "treat" : "skip") << "  "
         << (row.disagreement ? "DISAGREEMENT" : "") << '\n';
    } else {
      os << std::setw(12) << "-" << std::setw(10) << "-" << "  INCOMPATIBLE DATA" << '\n';
      for (const std::string& v : row.violations) os << "        " << v << '\n';
    }
  }
  os << '\n'
     << "disagreements: " << report.disagreement_count << " of " << report.rows.size() << '\n';
}

inline void render_table(const VerifyReport& report, std::ostream& os) {
  detail::print_benefit_vector(report.benefit_vector, os);
  os << "grid_step=" << detail::cell(report.grid_step)
     << "  tolerance=" << detail::cell(report.tolerance) << '\n'
     << '\n';
  os << std::left << std::setw(12) << "group" << std::right << std::setw(12) << "lower"
     << std::setw(12) << "upper" << std::setw(12) << "brute_min" << std::setw(12) << "brute_max"
     << std::setw(12) << "feasible" << std::setw(14) << "deviation" << "  result" << '\n';
  for (const VerifyRow& row : report.rows) {
    if (row.ok) {
      os << std::left << std::setw(12) << row.id << std::right << std::setw(12)
         << detail::cell(row.bounds.lower) << std::setw(12) << detail::cell(row.bounds.upper)
         << std::setw(12) << detail::cell(row.brute.min) << std::setw(12)
         << detail::cell(row.brute.max) << std::setw(12) << row.brute.n_feasible << std::setw(14)
         << detail::cell(row.max_deviation) << "  " << (row.pass ? "PASS" : "FAIL") << '\n';
    } else {
      os << std::left << std::setw(12) << row.id << "  ERROR: " << row.error << '\n';
    }
  }
  os << '\n' << "verification: " << (report.all_pass ? "PASS" : "FAIL") << '\n';
}

}  // namespace unitselect
