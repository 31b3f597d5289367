#pragma once

// Seeded finite-sample study generation from ground-truth models: binomial
// RCT arms and a categorical observational sample per group. Every draw comes
// from a per-group substream of one master seed, so output is reproducible
// and independent of how group work is scheduled.

#include <algorithm>
#include <cstdint>
#include <random>
#include <thread>
#include <unordered_set>
#include <vector>

#include "unitselect/model.hpp"
#include "unitselect/oracle.hpp"

namespace unitselect {

// Stable generator identity recorded in study metadata: mt19937_64 engine,
// uniform doubles from the top 53 bits, inversion sampling.
inline constexpr const char* kGeneratorId = "mt19937_64-u53-v1";

namespace detail {

inline double uniform53(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Seed for group substream `index`. Depends on (seed, index) only, so adding
// groups never perturbs the draws of earlier ones.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return detail::mix64(seed + (index + 1) * 0x9E3779B97F4A7C15ull);
}

inline std::int64_t sample_binomial(std::int64_t n, double p, std::mt19937_64& rng) {
  std::int64_t successes = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (detail::uniform53(rng) < p) ++successes;
  }
  return successes;
}

struct GroupTruth {
  std::string id;
  GroundTruth truth;
};

struct SimulationConfig {
  std::int64_t n_per_arm = 0;
  std::int64_t n_observational = 0;
  std::uint64_t seed = 0;
  std::vector<GroupTruth> groups;

  void validate() const {
    if (n_per_arm < 1) throw ValidationError("n_per_arm must be at least 1");
    if (n_observational < 0) throw ValidationError("n_observational must be nonnegative");
    if (n_per_arm > kMaxExactCount || n_observational > kMaxExactCount) {
      throw ValidationError("sample sizes exceed the exact-ratio range");
    }
    if (groups.empty()) throw ValidationError("simulation needs at least one group");
    std::unordered_set<std::string> seen;
    for (const GroupTruth& g : groups) {
      if (g.id.empty()) throw ValidationError("group id must be nonempty");
      if (!seen.insert(g.id).second) throw ValidationError("duplicate group id '" + g.id + "'");
      try {
        g.truth.validate();
      } catch (const ValidationError& e) {
        throw ValidationError("group '" + g.id + "': " + e.what());
      }
    }
  }
};

// One RCT: n_per_arm units under do(x), n_per_arm under do(x').
inline ArmCounts sample_experiment(const GroundTruth& g, std::int64_t n_per_arm,
                                   std::mt19937_64& rng) {
  const ExperimentalData truth = ground_truth_to_experimental(g);
  ArmCounts out;
  out.treated_n = n_per_arm;
  out.treated_y = sample_binomial(n_per_arm, truth.p_y_do_x, rng);
  out.control_n = n_per_arm;
  out.control_y = sample_binomial(n_per_arm, truth.p_y_do_xp, rng);
  return out;
}

// n passive observations of (treatment taken, outcome).
inline CellCounts sample_observational(const GroundTruth& g, std::int64_t n,
                                       std::mt19937_64& rng) {
  const ObservationalData truth = ground_truth_to_observational(g);
  CellCounts out;
  for (std::int64_t i = 0; i < n; ++i) {
    const double u = detail::uniform53(rng);
    if (u < truth.p_xy) {
      ++out.xy;
    } else if (u < truth.p_xy + truth.p_xyp) {
      ++out.xyp;
    } else if (u < truth.p_xy + truth.p_xyp + truth.p_xpy) {
      ++out.xpy;
    } else {
      ++out.xpyp;
    }
  }
  return out;
}

// Idealized arms: counts equal rounded expectations instead of draws.
inline ArmCounts expected_experiment(const GroundTruth& g, std::int64_t n_per_arm) {
  const ExperimentalData truth = ground_truth_to_experimental(g);
  ArmCounts out;
  out.treated_n = n_per_arm;
  out.treated_y = std::llround(static_cast<double>(n_per_arm) * truth.p_y_do_x);
  out.control_n = n_per_arm;
  out.control_y = std::llround(static_cast<double>(n_per_arm) * truth.p_y_do_xp);
  return out;
}

// Idealized observational cells: largest-remainder rounding keeps the total
// at exactly n. Ties go to the lower cell index.
inline CellCounts expected_observational(const GroundTruth& g, std::int64_t n) {
  const ObservationalData truth = ground_truth_to_observational(g);
  const std::array<double, 4> probs{truth.p_xy, truth.p_xyp, truth.p_xpy, truth.p_xpyp};
  std::array<std::int64_t, 4> cells{};
  std::array<double, 4> remainder{};
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double exact = static_cast<double>(n) * probs[i];
    cells[i] = static_cast<std::int64_t>(std::floor(exact));
    remainder[i] = exact - std::floor(exact);
    assigned += cells[i];
  }
  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return a < b;
  });
  for (std::int64_t k = 0; k < n - assigned; ++k) ++cells[order[static_cast<std::size_t>(k) % 4]];
  return {cells[0], cells[1], cells[2], cells[3]};
}

struct StudyGenOptions {
  bool exact_expectations = false;  // rounded expected counts instead of draws
  int workers = 1;                  // parallel groups; output independent of the count
};

inline Study generate_study(const SimulationConfig& cfg, const BenefitVector& bv,
                            const StudyGenOptions& options = {}) {
  cfg.validate();
  bv.validate();
  if (options.workers < 1) throw ValidationError("workers must be at least 1");

  Study study;
  study.benefit_vector = bv;
  study.groups.resize(cfg.groups.size());

  const auto build_group = [&](std::size_t i) {
    const GroupTruth& gt = cfg.groups[i];
    std::mt19937_64 rng(substream_seed(cfg.seed, i));
    const ArmCounts arms = options.exact_expectations
                               ? expected_experiment(gt.truth, cfg.n_per_arm)
                               : sample_experiment(gt.truth, cfg.n_per_arm, rng);
    GroupData g;
    g.id = gt.id;
    g.experimental =
        experimental_from_counts(arms.treated_n, arms.treated_y, arms.control_n, arms.control_y);
    if (cfg.n_observational > 0) {
      const CellCounts cells = options.exact_expectations
                                   ? expected_observational(gt.truth, cfg.n_observational)
                                   : sample_observational(gt.truth, cfg.n_observational, rng);
      g.observational = observational_from_counts(cells.xy, cells.xyp, cells.xpy, cells.xpyp);
    }
    study.groups[i] = std::move(g);
  };

  const std::size_t n = cfg.groups.size();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(options.workers), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) build_group(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) build_group(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return study;
}

// Groups whose sampled data turned out internally contradictory; a finite
// sample can do this even when its generating model cannot.
inline std::vector<std::string> incompatible_group_ids(const Study& study) {
  std::vector<std::string> out;
  for (const GroupData& g : study.groups) {
    if (!check_compatibility(g.experimental, g.observational).compatible) {
      out.push_back(g.id);
    }
  }
  return out;
}

}  // namespace unitselect
