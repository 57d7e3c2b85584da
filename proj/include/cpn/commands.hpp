#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpn/counterexample.hpp"
#include "cpn/report.hpp"

namespace cpn {

struct CommandOptions {
  int n = 3;
  int order = 8;                 // K
  std::optional<int> jet_order;  // M, defaults to K + 2
  std::uint64_t seed = 0;
  double tol = 1e-9;
  SolitonParams soliton;
  std::optional<cplx> center;    // monodromy; empty means the nearest branch point above chi0
  double radius = 0.3;
  int steps = 512;
  std::vector<double> radii{1e-1, 5e-2, 2e-2, 1e-2};
  int samples = 100;             // counterexample sample points
  double chi_radius = 2.0;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"exponents",      "resonances",     "build-series",
                                              "verify-series",  "counterexample", "monodromy"};
  return names;
}

RunReport run_exponents(const CommandOptions& opt);
RunReport run_resonances(const CommandOptions& opt);
RunReport run_build_series(const CommandOptions& opt);
RunReport run_verify_series(const CommandOptions& opt);
RunReport run_counterexample(const CommandOptions& opt);
RunReport run_monodromy(const CommandOptions& opt);

/// Dispatches by name, times the run and converts library errors into an error report.
RunReport run_command(const std::string& name, const CommandOptions& opt);

/// Branch point used by `--center auto`: smallest positive imaginary offset from chi0.
cplx auto_center(const SolitonParams& params);

} // namespace cpn
