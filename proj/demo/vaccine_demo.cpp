// Two-group vaccine example: the raw rate difference says "treat both", the
// benefit bounds under the vector (1, -1, -1, -1) say group c1 is harmful on
// balance. Builds the study in code and prints both views.

#include <iostream>

#include "unitselect/bounds.hpp"
#include "unitselect/heuristics.hpp"
#include "unitselect/report.hpp"

int main() {
  using namespace unitselect;

  Study study;
  study.benefit_vector = {1.0, -1.0, -1.0, -1.0};  // benefited / ineffective / harmed

  GroupData c1;
  c1.id = "c1";
  c1.experimental = experimental_from_counts(750, 450, 750, 225);
  study.groups.push_back(c1);

  GroupData c2;
  c2.id = "c2";
  c2.experimental = experimental_from_counts(750, 525, 750, 225);
  c2.observational = observational_from_counts(5, 95, 13, 247);
  study.groups.push_back(c2);

  std::cout << "== benefit bounds ==\n";
  render_table(make_bounds_report(study, Estimator::midpoint), std::cout);

  std::cout << "\n== against the plain rate difference ==\n";
  render_table(make_compare_report(study, ABHeuristic{1.0, 1.0}), std::cout);
  return 0;
}
