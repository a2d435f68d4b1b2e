// One line per acceptance criterion; exit status 1 if any criterion fails.

#include <iostream>
#include <string>

#include "bipcorr/acceptance.hpp"

int main(int argc, char** argv) {
  bipcorr::acceptance::Options options;
  if (argc > 1) options.golden_dir = argv[1];
  int failed = 0;
  for (const auto& r : bipcorr::acceptance::run_all(options)) {
    std::cout << bipcorr::acceptance::format_line(r) << std::endl;
    failed += !r.passed;
  }
  std::cout << (failed ? std::to_string(failed) + " criterion(s) failed" : "all criteria passed")
            << std::endl;
  return failed ? 1 : 0;
}
