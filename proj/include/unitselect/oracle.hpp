#pragma once

// Ground-truth structural model used for verification. A GroundTruth fixes
// the joint distribution over (response type, natural treatment choice); from
// it the exact benefit and both observable data regimes follow directly. The
// brute-force range enumerates such models on a simplex grid and is the
// independent check that the closed-form bounds are valid and attained.

#include <array>
#include <cstddef>
#include <limits>
#include <optional>

#include "unitselect/model.hpp"

namespace unitselect {

enum class ResponseType : int { complier = 0, always_taker = 1, never_taker = 2, defier = 3 };

inline constexpr std::array<const char*, 4> kResponseTypeNames = {"complier", "always_taker",
                                                                  "never_taker", "defier"};

struct ResponseTypeDistribution {
  double complier = 0.0;
  double always_taker = 0.0;
  double never_taker = 0.0;
  double defier = 0.0;

  void validate() const {
    if (!detail::is_probability(complier) || !detail::is_probability(always_taker) ||
        !detail::is_probability(never_taker) || !detail::is_probability(defier)) {
      throw ValidationError("response-type shares must lie in [0, 1]");
    }
    const double sum = (complier + always_taker) + (never_taker + defier);
    if (std::fabs(sum - 1.0) > kCellSumTol) {
      throw ValidationError("response-type shares must sum to 1, got " + detail::fmt(sum));
    }
  }
};

// Joint distribution over (response type, natural treatment choice). The
// natural choice is the treatment a unit takes when nobody intervenes; it
// carries all confounding between selection and response type.
struct GroundTruth {
  // cell index: 2 * type + (0 if the unit naturally takes x, 1 for x')
  std::array<double, 8> joint{};

  static constexpr std::size_t index(ResponseType t, bool natural_x) {
    return 2 * static_cast<std::size_t>(t) + (natural_x ? 0 : 1);
  }
  double cell(ResponseType t, bool natural_x) const { return joint[index(t, natural_x)]; }
  double& cell(ResponseType t, bool natural_x) { return joint[index(t, natural_x)]; }

  ResponseTypeDistribution response_types() const {
    return {joint[0] + joint[1], joint[2] + joint[3], joint[4] + joint[5], joint[6] + joint[7]};
  }

  static GroundTruth from_response_types(
      const ResponseTypeDistribution& rt,
      const std::array<double, 4>& p_natural_x = {0.5, 0.5, 0.5, 0.5}) {
    rt.validate();
    for (double p : p_natural_x) {
      if (!detail::is_probability(p)) {
        throw ValidationError("natural-choice probabilities must lie in [0, 1]");
      }
    }
    const std::array<double, 4> shares{rt.complier, rt.always_taker, rt.never_taker, rt.defier};
    GroundTruth g;
    for (std::size_t t = 0; t < 4; ++t) {
      g.joint[2 * t] = shares[t] * p_natural_x[t];
      g.joint[2 * t + 1] = shares[t] * (1.0 - p_natural_x[t]);
    }
    return g;
  }

  void validate() const {
    double sum = 0.0;
    for (double c : joint) {
      if (!detail::is_probability(c)) {
        throw ValidationError("ground-truth cells must lie in [0, 1]");
      }
      sum += c;
    }
    if (std::fabs(sum - 1.0) > kCellSumTol) {
      throw ValidationError("ground-truth cells must sum to 1, got " + detail::fmt(sum));
    }
  }
};

// Average payoff per selected unit under a known response-type distribution.
inline double exact_benefit(const BenefitVector& bv, const ResponseTypeDistribution& rt) {
  return (bv.complier * rt.complier + bv.always_taker * rt.always_taker) +
         (bv.never_taker * rt.never_taker + bv.defier * rt.defier);
}

// What a randomized experiment on this model measures: under do(x) the
// compliers and always-takers respond, under do(x') the always-takers and
// defiers do.
inline ExperimentalData ground_truth_to_experimental(const GroundTruth& g) {
  const ResponseTypeDistribution rt = g.response_types();
  ExperimentalData out;
  out.p_y_do_x = rt.complier + rt.always_taker;
  out.p_y_do_xp = rt.always_taker + rt.defier;
  return out;
}

// What passive observation measures: each unit exhibits the potential
// outcome matching its natural choice.
inline ObservationalData ground_truth_to_observational(const GroundTruth& g) {
  ObservationalData out;
  out.p_xy = g.cell(ResponseType::complier, true) + g.cell(ResponseType::always_taker, true);
  out.p_xyp = g.cell(ResponseType::never_taker, true) + g.cell(ResponseType::defier, true);
  out.p_xpy = g.cell(ResponseType::always_taker, false) + g.cell(ResponseType::defier, false);
  out.p_xpyp = g.cell(ResponseType::complier, false) + g.cell(ResponseType::never_taker, false);
  return out;
}

inline bool is_monotonic(const ResponseTypeDistribution& rt) { return rt.defier <= kBoundTol; }

struct BruteForceRange {
  double min = 0.0;
  double max = 0.0;
  std::int64_t n_feasible = 0;
};

namespace detail {

template <std::size_t K, typename Fn>
void compositions_rec(std::array<int, K>& cells, std::size_t pos, int remaining, Fn& fn) {
  if (pos + 1 == K) {
    cells[pos] = remaining;
    fn(cells);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    cells[pos] = v;
    compositions_rec(cells, pos + 1, remaining - v, fn);
  }
}

// All ways to split `total` grid quanta over K cells.
template <std::size_t K, typename Fn>
void for_each_composition(int total, Fn fn) {
  std::array<int, K> cells{};
  compositions_rec<K>(cells, 0, total, fn);
}

}  // namespace detail

// Enumerates ground-truth models on a simplex grid of the given resolution,
// keeps the ones whose induced data match the inputs within grid_step, and
// returns the exact-benefit range over the survivors. Independent of the
// closed-form path: nothing here touches the bound formulas.
inline BruteForceRange brute_force_benefit_range(const BenefitVector& bv,
                                                 const ExperimentalData& exp,
                                                 const std::optional<ObservationalData>& obs,
                                                 double grid_step) {
  bv.validate();
  exp.validate();
  if (obs) obs->validate();
  if (!(grid_step > 0.0) || grid_step > 0.1) {
    throw ValidationError("grid_step must lie in (0, 0.1]");
  }
  const int quanta = static_cast<int>(std::ceil(1.0 / grid_step - 1e-9));
  const double cell_width = 1.0 / static_cast<double>(quanta);
  // Strict matching: a deviation of one full step belongs to the next grid
  // point, not to this one. Grid-aligned data therefore match exactly.
  const double tol = grid_step - 1e-12;

  BruteForceRange out;
  out.min = std::numeric_limits<double>::infinity();
  out.max = -std::numeric_limits<double>::infinity();

  const auto consider = [&](const ResponseTypeDistribution& rt) {
    const double value = exact_benefit(bv, rt);
    out.min = std::min(out.min, value);
    out.max = std::max(out.max, value);
    ++out.n_feasible;
  };

  if (!obs) {
    // Natural choice never shows up in experimental marginals; the four
    // response-type shares are enough.
    detail::for_each_composition<4>(quanta, [&](const std::array<int, 4>& c) {
      ResponseTypeDistribution rt{c[0] * cell_width, c[1] * cell_width, c[2] * cell_width,
                                  c[3] * cell_width};
      if (std::fabs(rt.complier + rt.always_taker - exp.p_y_do_x) > tol) return;
      if (std::fabs(rt.always_taker + rt.defier - exp.p_y_do_xp) > tol) return;
      consider(rt);
    });
  } else {
    detail::for_each_composition<8>(quanta, [&](const std::array<int, 8>& c) {
      ResponseTypeDistribution rt{(c[0] + c[1]) * cell_width, (c[2] + c[3]) * cell_width,
                                  (c[4] + c[5]) * cell_width, (c[6] + c[7]) * cell_width};
      if (std::fabs(rt.complier + rt.always_taker - exp.p_y_do_x) > tol) return;
      if (std::fabs(rt.always_taker + rt.defier - exp.p_y_do_xp) > tol) return;
      if (std::fabs((c[0] + c[2]) * cell_width - obs->p_xy) > tol) return;
      if (std::fabs((c[4] + c[6]) * cell_width - obs->p_xyp) > tol) return;
      if (std::fabs((c[3] + c[7]) * cell_width - obs->p_xpy) > tol) return;
      if (std::fabs((c[1] + c[5]) * cell_width - obs->p_xpyp) > tol) return;
      consider(rt);
    });
  }

  if (out.n_feasible == 0) {
    throw NoFeasiblePoint("no grid model matches the data at step " + detail::fmt(grid_step) +
                          "; data incompatible or grid too coarse");
  }
  return out;
}

}  // namespace unitselect
