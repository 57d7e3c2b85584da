#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpn/precision.hpp"

namespace cpn {

using Json = nlohmann::ordered_json;

enum class Status { pass, mismatch, error };

std::string to_string(Status s);

/// Exit-code contract: 0 pass, 2 mismatch, 1 error.
int exit_code(Status s);

struct Check {
  std::string name;
  Json expected;
  Json observed;
  std::optional<double> tolerance;
  bool passed = false;
};

struct RunReport {
  std::string command;
  Json config = Json::object();
  std::vector<Check> checks;
  Json results = Json::object();
  std::vector<std::string> caveats;
  Status status = Status::pass;
  std::string error;
  double wall_time = 0.0;

  void add_check(std::string name, Json expected, Json observed, std::optional<double> tolerance,
                 bool passed);

  /// pass iff every check passed and no error was recorded.
  void finalize();

  Json to_json() const;
};

/// Human-readable tables for a report.
std::string emit_summary(const RunReport& report);

// Decimal-string encodings for values where 1e-12 fidelity matters.
std::string num(double x);
Json num(cplx z);
Json nums(const std::vector<double>& xs);
Json nums(const std::vector<cplx>& zs);
Json multiplicities(const std::map<int, int>& m);

namespace caveats {
inline constexpr const char* resonance_sign =
    "order-k operator uses +2 w_i^0 wbar_j^0 (a -2 sign would move the k = -1 resonance to k = 3)";
inline constexpr const char* determinant_sign =
    "det B = (-1)^N S^(N-1); the form -S^(N-1) agrees only for odd N";
inline constexpr const char* conjugation =
    "barred field equations are the exact w <-> wbar image of the unbarred ones";
inline constexpr const char* first_integrals =
    "first-integral tally 4N-5 = 2(N-1) + 2(N-2) + 1; a tally of 2N-5 does not match this count";
inline constexpr const char* branch_location =
    "tanh g has poles at chi0 + 2(p-1)/(p+1) (m+1/2) i pi; chi0 + (m+1/2) i pi agrees only at p = 3";
} // namespace caveats

} // namespace cpn
