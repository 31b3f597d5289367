#pragma once

// A/B-test scores of the form a*P(y|do(x)) - b*P(y|do(x')) and their exact
// correspondence with benefit vectors. Expanding the two effective rates by
// response type shows such a score always prices the never-taker at zero and
// the always-taker at a - b, which is what limits its expressive power.

#include <optional>

#include "unitselect/model.hpp"

namespace unitselect {

struct ABHeuristic {
  double a = 0.0;  // weight on P(y|do(x))
  double b = 0.0;  // weight on P(y|do(x'))

  void validate() const {
    if (!std::isfinite(a) || !std::isfinite(b)) {
      throw ValidationError("heuristic weights must be finite");
    }
  }

  double evaluate(const ExperimentalData& exp) const {
    return a * exp.p_y_do_x - b * exp.p_y_do_xp;
  }
};

// The benefit vector an A/B score implicitly optimizes:
// a*P(y|do(x)) - b*P(y|do(x')) = a*P(complier) + (a-b)*P(always-taker) - b*P(defier).
inline BenefitVector induced_benefit_vector(const ABHeuristic& h) {
  return BenefitVector{h.a, h.a - h.b, 0.0, -h.b};
}

// Inverse direction: a benefit vector is expressible as an A/B score iff
// theta = 0 and gamma = beta + delta. Returns the weights when it is.
inline std::optional<ABHeuristic> ab_representation(const BenefitVector& bv) {
  const double tol = kPayoffRelTol * bv.scale();
  if (std::fabs(bv.never_taker) > tol) return std::nullopt;
  if (std::fabs(bv.always_taker - (bv.complier + bv.defier)) > tol) return std::nullopt;
  return ABHeuristic{bv.complier, -bv.defier};
}

}  // namespace unitselect
