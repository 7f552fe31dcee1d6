// Acceptance run: one PASS/FAIL line per criterion. Optional arguments pick
// criteria by number; the exit status counts failures outside the list of
// known-unreachable criteria.
#include "roughldp/cli/verify.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  using namespace roughldp::cli;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (int i = 1; i <= 10; ++i) ids.push_back(i);
  }
  VerifyScale scale;
  if (const char* f = std::getenv("ROUGHLDP_PATH_FACTOR")) scale.path_factor = std::atof(f);

  int unexpected = 0;
  for (int id : ids) {
    const CriterionOutcome o = run_criterion(id, scale);
    print_outcome(std::cout, o);
    std::cout.flush();
    const auto& known = expected_failures();
    if (!o.pass) {
      if (std::find(known.begin(), known.end(), id) != known.end()) {
        std::cout << "  note: criterion " << id << " is a documented known failure\n";
      } else {
        ++unexpected;
      }
    }
  }
  return unexpected == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
