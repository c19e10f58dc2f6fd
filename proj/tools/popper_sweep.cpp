// Sweeps the slit half-width and reports the right-photon momentum spread.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.

#include <exception>
#include <iostream>

#include "popperlab/sweep.hpp"

int main(int argc, char** argv) {
  using namespace popperlab;
  SweepConfig config;
  try {
    config = parse_config(argc, argv);
  } catch (const HelpRequested& help) {
    std::cout << help.what();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "popper_sweep: " << e.what() << "\n";
    return 1;
  }

  for (const auto& note : config.notes) std::cerr << "popper_sweep: note: " << note << "\n";

  std::vector<SweepRow> rows;
  try {
    rows = run_sweep(config);
  } catch (const std::exception& e) {
    std::cerr << "popper_sweep: " << e.what() << "\n";
    return 2;
  }

  try {
    emit(rows, config);
  } catch (const std::exception& e) {
    std::cerr << "popper_sweep: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
