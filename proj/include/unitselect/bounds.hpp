#pragma once

// Tight bounds on the benefit function. For a payoff vector (beta, gamma,
// theta, delta) over (complier, always-taker, never-taker, defier) the
// average per-unit benefit decomposes as
//
//     f = w + sigma * P(complier),
//
// where sigma and w depend only on the payoffs and the experimental
// marginals. Bounding f therefore reduces to the tight envelope on the
// complier probability.

#include <algorithm>
#include <optional>
#include <string_view>
#include <vector>

#include "unitselect/model.hpp"

namespace unitselect {

// Net payoff contrast multiplying the complier probability.
inline double sigma(const BenefitVector& bv) {
  return bv.complier - bv.always_taker - bv.never_taker + bv.defier;
}

// Marginal-only part of the benefit decomposition.
inline double w_term(const BenefitVector& bv, const ExperimentalData& exp) {
  return (bv.always_taker - bv.defier) * exp.p_y_do_x + bv.defier * exp.p_y_do_xp +
         bv.never_taker * exp.p_yp_do_xp();
}

struct ComplierBounds {
  double lower = 0.0;
  double upper = 1.0;
};

// Tight envelope on P(complier) given experimental and, when available,
// observational data. Throws IncompatibleData when the envelope is empty.
inline ComplierBounds complier_bounds(const ExperimentalData& exp,
                                      const std::optional<ObservationalData>& obs = std::nullopt) {
  const CompatibilityReport rep = check_compatibility(exp, obs);
  if (!rep.compatible) {
    std::string msg = "experimental and observational data are incompatible";
    for (const std::string& v : rep.violations) msg += "; " + v;
    throw IncompatibleData(msg);
  }
  return {std::min(rep.lower, rep.upper), rep.upper};
}

struct BenefitBounds {
  double lower = 0.0;
  double upper = 0.0;
  double sigma = 0.0;           // complier-mass coefficient of the decomposition
  double w = 0.0;               // marginal-only term
  double complier_lower = 0.0;  // envelope on P(complier), lower end
  double complier_upper = 1.0;  // envelope on P(complier), upper end
  bool point_identified = false;
};

inline BenefitBounds benefit_bounds(const BenefitVector& bv, const ExperimentalData& exp,
                                    const std::optional<ObservationalData>& obs = std::nullopt) {
  const ComplierBounds cb = complier_bounds(exp, obs);
  BenefitBounds out;
  out.sigma = sigma(bv);
  out.w = w_term(bv, exp);
  out.complier_lower = cb.lower;
  out.complier_upper = cb.upper;
  if (std::fabs(out.sigma) <= kBoundTol) {
    // Degenerate direction: f no longer depends on the complier mass.
    out.lower = out.upper = out.w;
  } else if (out.sigma > 0.0) {
    out.lower = out.w + out.sigma * cb.lower;
    out.upper = out.w + out.sigma * cb.upper;
  } else {
    out.lower = out.w + out.sigma * cb.upper;
    out.upper = out.w + out.sigma * cb.lower;
  }
  out.point_identified = (out.upper - out.lower) <= kBoundTol;
  return out;
}

// True when beta + delta = gamma + theta, the condition under which the
// benefit function is point-identified from experimental data alone.
inline bool gain_equality_check(const BenefitVector& bv) {
  const double gap = (bv.complier + bv.defier) - (bv.always_taker + bv.never_taker);
  return std::fabs(gap) <= kPayoffRelTol * bv.scale();
}

struct PointEstimate {
  double value = 0.0;
  // Set when gain equality fails: the value is then valid only under the
  // external monotonicity (no-defiers) assumption, which data cannot certify.
  bool assumption_required = false;
};

inline PointEstimate point_estimate(const BenefitVector& bv, const ExperimentalData& exp) {
  PointEstimate out;
  out.value = (bv.complier - bv.never_taker) * exp.p_y_do_x +
              (bv.always_taker - bv.complier) * exp.p_y_do_xp + bv.never_taker;
  out.assumption_required = !gain_equality_check(bv);
  return out;
}

inline double midpoint_estimate(const BenefitBounds& b) { return (b.lower + b.upper) / 2.0; }

enum class Estimator { midpoint, lower, upper };

inline const char* to_string(Estimator e) {
  switch (e) {
    case Estimator::midpoint: return "midpoint";
    case Estimator::lower: return "lower";
    case Estimator::upper: return "upper";
  }
  return "midpoint";
}

inline std::optional<Estimator> estimator_from_string(std::string_view s) {
  if (s == "midpoint") return Estimator::midpoint;
  if (s == "lower") return Estimator::lower;
  if (s == "upper") return Estimator::upper;
  return std::nullopt;
}

inline double estimate_of(const BenefitBounds& b, Estimator e) {
  switch (e) {
    case Estimator::midpoint: return midpoint_estimate(b);
    case Estimator::lower: return b.lower;
    case Estimator::upper: return b.upper;
  }
  return midpoint_estimate(b);
}

struct RankedGroup {
  std::string id;
  double estimate = 0.0;
  BenefitBounds bounds;
};

// Groups sorted by descending estimate, ties broken by id. Throws
// IncompatibleData naming the first offending group.
inline std::vector<RankedGroup> rank_groups(const Study& study,
                                            Estimator estimator = Estimator::midpoint) {
  study.validate();
  std::vector<RankedGroup> out;
  out.reserve(study.groups.size());
  for (const GroupData& g : study.groups) {
    try {
      BenefitBounds b = benefit_bounds(study.benefit_vector, g.experimental, g.observational);
      out.push_back({g.id, estimate_of(b, estimator), b});
    } catch (const IncompatibleData& e) {
      throw IncompatibleData("group '" + g.id + "': " + e.what());
    }
  }
  std::sort(out.begin(), out.end(), [](const RankedGroup& a, const RankedGroup& b) {
    if (a.estimate != b.estimate) return a.estimate > b.estimate;
    return a.id < b.id;
  });
  return out;
}

}  // namespace unitselect
