#pragma once

// Core domain types for counterfactual unit selection: payoff vectors over
// the four response types, per-group experimental and observational data,
// and the compatibility check every bound computation relies on.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace unitselect {

// Probabilities are plain doubles. Input data carry a few decimals at most,
// so these tolerances sit far below data resolution.
inline constexpr double kCellSumTol = 1e-9;    // joint distributions must sum to 1
inline constexpr double kBoundTol = 1e-12;     // bound crossings, point-interval width
inline constexpr double kPayoffRelTol = 1e-9;  // payoff identities, relative

// Largest count whose ratio against another count is still exact in double.
inline constexpr std::int64_t kMaxExactCount = std::int64_t(1) << 53;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidCounts : ValidationError {
  using ValidationError::ValidationError;
};

// Experimental and observational inputs cannot have come from one population.
struct IncompatibleData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Grid enumeration found no model matching the data (see oracle.hpp).
struct NoFeasiblePoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

inline std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace detail

// Payoff of selecting one unit of each response type. Units are whatever the
// caller optimizes: currency, customer counts, effectiveness scores.
struct BenefitVector {
  double complier = 0.0;
  double always_taker = 0.0;
  double never_taker = 0.0;
  double defier = 0.0;

  double magnitude() const {
    return std::fabs(complier) + std::fabs(always_taker) + std::fabs(never_taker) +
           std::fabs(defier);
  }

  // Scale for relative payoff comparisons; never below 1 so that all-zero
  // vectors still compare sanely.
  double scale() const { return std::max(1.0, magnitude()); }

  void validate() const {
    if (!std::isfinite(complier) || !std::isfinite(always_taker) ||
        !std::isfinite(never_taker) || !std::isfinite(defier)) {
      throw ValidationError("benefit vector entries must be finite");
    }
  }
};

struct ArmCounts {
  std::int64_t treated_n = 0;
  std::int64_t treated_y = 0;
  std::int64_t control_n = 0;
  std::int64_t control_y = 0;
};

// Causal-effect probabilities from a randomized experiment: the success rate
// under treatment, P(y|do(x)), and under no treatment, P(y|do(x')). When the
// data arrived as arm counts they are kept alongside the ratios.
struct ExperimentalData {
  double p_y_do_x = 0.0;
  double p_y_do_xp = 0.0;
  std::optional<ArmCounts> counts;

  double p_yp_do_xp() const { return 1.0 - p_y_do_xp; }

  void validate() const {
    if (!detail::is_probability(p_y_do_x) || !detail::is_probability(p_y_do_xp)) {
      throw ValidationError("experimental probabilities must lie in [0, 1]");
    }
    if (counts) {
      const ArmCounts& c = *counts;
      if (c.treated_n <= 0 || c.control_n <= 0) {
        throw InvalidCounts("arm sizes must be positive");
      }
      if (c.treated_n > kMaxExactCount || c.control_n > kMaxExactCount) {
        throw InvalidCounts("arm sizes exceed the exact-ratio range");
      }
      if (c.treated_y < 0 || c.treated_y > c.treated_n || c.control_y < 0 ||
          c.control_y > c.control_n) {
        throw InvalidCounts("arm successes must lie in [0, arm size]");
      }
      if (p_y_do_x != static_cast<double>(c.treated_y) / static_cast<double>(c.treated_n) ||
          p_y_do_xp != static_cast<double>(c.control_y) / static_cast<double>(c.control_n)) {
        throw InvalidCounts("experimental probabilities do not match their counts");
      }
    }
  }
};

inline ExperimentalData experimental_from_counts(std::int64_t treated_n, std::int64_t treated_y,
                                                 std::int64_t control_n, std::int64_t control_y) {
  ExperimentalData out;
  out.counts = ArmCounts{treated_n, treated_y, control_n, control_y};
  if (treated_n <= 0 || control_n <= 0) throw InvalidCounts("arm sizes must be positive");
  if (treated_n > kMaxExactCount || control_n > kMaxExactCount) {
    throw InvalidCounts("arm sizes exceed the exact-ratio range");
  }
  if (treated_y < 0 || treated_y > treated_n || control_y < 0 || control_y > control_n) {
    throw InvalidCounts("arm successes must lie in [0, arm size]");
  }
  out.p_y_do_x = static_cast<double>(treated_y) / static_cast<double>(treated_n);
  out.p_y_do_xp = static_cast<double>(control_y) / static_cast<double>(control_n);
  return out;
}

struct CellCounts {
  std::int64_t xy = 0;
  std::int64_t xyp = 0;
  std::int64_t xpy = 0;
  std::int64_t xpyp = 0;

  std::int64_t total() const { return xy + xyp + xpy + xpyp; }
};

// Joint distribution P(X, Y) under natural (possibly confounded) treatment
// selection: the four cells of the 2x2 contingency table.
struct ObservationalData {
  double p_xy = 0.0;    // P(x, y)
  double p_xyp = 0.0;   // P(x, y')
  double p_xpy = 0.0;   // P(x', y)
  double p_xpyp = 0.0;  // P(x', y')
  std::optional<CellCounts> counts;

  double p_y() const { return p_xy + p_xpy; }
  double p_x() const { return p_xy + p_xyp; }

  void validate() const {
    if (!detail::is_probability(p_xy) || !detail::is_probability(p_xyp) ||
        !detail::is_probability(p_xpy) || !detail::is_probability(p_xpyp)) {
      throw ValidationError("observational cells must lie in [0, 1]");
    }
    const double sum = (p_xy + p_xyp) + (p_xpy + p_xpyp);
    if (std::fabs(sum - 1.0) > kCellSumTol) {
      throw ValidationError("observational cells must sum to 1, got " + detail::fmt(sum));
    }
    if (counts) {
      const CellCounts& c = *counts;
      if (c.xy < 0 || c.xyp < 0 || c.xpy < 0 || c.xpyp < 0) {
        throw InvalidCounts("observational cell counts must be nonnegative");
      }
      const std::int64_t n = c.total();
      if (n <= 0 || n > kMaxExactCount) {
        throw InvalidCounts("observational counts must total a positive exact-range number");
      }
      const double dn = static_cast<double>(n);
      if (p_xy != static_cast<double>(c.xy) / dn || p_xyp != static_cast<double>(c.xyp) / dn ||
          p_xpy != static_cast<double>(c.xpy) / dn || p_xpyp != static_cast<double>(c.xpyp) / dn) {
        throw InvalidCounts("observational cells do not match their counts");
      }
    }
  }
};

inline ObservationalData observational_from_counts(std::int64_t xy, std::int64_t xyp,
                                                   std::int64_t xpy, std::int64_t xpyp) {
  if (xy < 0 || xyp < 0 || xpy < 0 || xpyp < 0) {
    throw InvalidCounts("observational cell counts must be nonnegative");
  }
  ObservationalData out;
  out.counts = CellCounts{xy, xyp, xpy, xpyp};
  const std::int64_t n = out.counts->total();
  if (n <= 0) throw InvalidCounts("observational counts must total a positive number");
  if (n > kMaxExactCount) throw InvalidCounts("observational counts exceed the exact-ratio range");
  const double dn = static_cast<double>(n);
  out.p_xy = static_cast<double>(xy) / dn;
  out.p_xyp = static_cast<double>(xyp) / dn;
  out.p_xpy = static_cast<double>(xpy) / dn;
  out.p_xpyp = static_cast<double>(xpyp) / dn;
  return out;
}

// One population group: an opaque label plus the data observed for it.
struct GroupData {
  std::string id;
  ExperimentalData experimental;
  std::optional<ObservationalData> observational;

  void validate() const {
    if (id.empty()) throw ValidationError("group id must be nonempty");
    experimental.validate();
    if (observational) observational->validate();
  }
};

struct Study {
  BenefitVector benefit_vector;
  std::vector<GroupData> groups;

  void validate() const {
    benefit_vector.validate();
    if (groups.empty()) throw ValidationError("study must contain at least one group");
    std::unordered_set<std::string> seen;
    for (const GroupData& g : groups) {
      try {
        g.validate();
      } catch (const ValidationError& e) {
        throw ValidationError("group '" + g.id + "': " + e.what());
      }
      if (!seen.insert(g.id).second) {
        throw ValidationError("duplicate group id '" + g.id + "'");
      }
    }
  }
};

namespace detail {

struct BoundTerm {
  double value;
  const char* name;
};

// Candidate envelope terms for the complier probability P(y_x, y'_x').
// The observational terms exist only when observational data do.
struct ComplierTermSet {
  std::vector<BoundTerm> lower;
  std::vector<BoundTerm> upper;
};

inline ComplierTermSet complier_terms(const ExperimentalData& exp,
                                      const std::optional<ObservationalData>& obs) {
  const double p1 = exp.p_y_do_x;
  const double p0 = exp.p_y_do_xp;
  ComplierTermSet t;
  t.lower = {{0.0, "0"}, {p1 - p0, "P(y|do(x)) - P(y|do(x'))"}};
  t.upper = {{p1, "P(y|do(x))"}, {1.0 - p0, "P(y'|do(x'))"}};
  if (obs) {
    const double py = obs->p_y();
    t.lower.push_back({py - p0, "P(y) - P(y|do(x'))"});
    t.lower.push_back({p1 - py, "P(y|do(x)) - P(y)"});
    t.upper.push_back({obs->p_xy + obs->p_xpyp, "P(x,y) + P(x',y')"});
    t.upper.push_back(
        {p1 - p0 + obs->p_xyp + obs->p_xpy, "P(y|do(x)) - P(y|do(x')) + P(x,y') + P(x',y)"});
  }
  return t;
}

}  // namespace detail

struct CompatibilityReport {
  bool compatible = true;
  double lower = 0.0;  // tightest lower bound on the complier probability
  double upper = 1.0;  // tightest upper bound
  std::vector<std::string> violations;
};

// Cross-checks experimental against observational data. The pair is
// compatible exactly when the complier-probability envelope is nonempty;
// every crossed pair of envelope terms is reported by name.
// Expects individually valid inputs.
inline CompatibilityReport check_compatibility(
    const ExperimentalData& exp, const std::optional<ObservationalData>& obs = std::nullopt) {
  const detail::ComplierTermSet terms = detail::complier_terms(exp, obs);
  CompatibilityReport rep;
  rep.lower = terms.lower.front().value;
  for (const auto& t : terms.lower) rep.lower = std::max(rep.lower, t.value);
  rep.upper = terms.upper.front().value;
  for (const auto& t : terms.upper) rep.upper = std::min(rep.upper, t.value);
  for (const auto& lo : terms.lower) {
    for (const auto& hi : terms.upper) {
      if (lo.value > hi.value + kBoundTol) {
        std::ostringstream os;
        os << lo.name << " = " << lo.value << " exceeds " << hi.name << " = " << hi.value;
        rep.violations.push_back(os.str());
      }
    }
  }
  rep.compatible = rep.lower <= rep.upper + kBoundTol;
  return rep;
}

}  // namespace unitselect
