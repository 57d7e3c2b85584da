#include "cpn/report.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace cpn {

std::string to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::mismatch: return "mismatch";
    case Status::error: return "error";
  }
  return "error";
}

int exit_code(Status s) {
  switch (s) {
    case Status::pass: return 0;
    case Status::mismatch: return 2;
    case Status::error: return 1;
  }
  return 1;
}

std::string num(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  // Shortest representation that round-trips exactly.
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json num(cplx z) { return Json{{"re", num(z.real())}, {"im", num(z.imag())}}; }

Json nums(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(num(x));
  return out;
}

Json nums(const std::vector<cplx>& zs) {
  Json out = Json::array();
  for (const auto& z : zs) out.push_back(num(z));
  return out;
}

Json multiplicities(const std::map<int, int>& m) {
  Json out = Json::object();
  for (const auto& [k, v] : m) out[std::to_string(k)] = v;
  return out;
}

void RunReport::add_check(std::string name, Json expected, Json observed, std::optional<double> tolerance,
                          bool passed) {
  checks.push_back({std::move(name), std::move(expected), std::move(observed), tolerance, passed});
}

void RunReport::finalize() {
  if (!error.empty()) {
    status = Status::error;
    return;
  }
  const bool all = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  status = all ? Status::pass : Status::mismatch;
}

Json RunReport::to_json() const {
  Json j;
  j["command"] = command;
  j["config"] = config;
  Json list = Json::array();
  for (const auto& c : checks) {
    Json e;
    e["name"] = c.name;
    e["expected"] = c.expected;
    e["observed"] = c.observed;
    e["tolerance"] = c.tolerance ? Json(num(*c.tolerance)) : Json(nullptr);
    e["status"] = c.passed ? "pass" : "mismatch";
    list.push_back(std::move(e));
  }
  j["checks"] = std::move(list);
  j["results"] = results;
  j["caveats"] = caveats;
  j["status"] = to_string(status);
  if (!error.empty()) j["error"] = error;
  j["wall_time"] = wall_time;
  return j;
}

namespace {

std::string cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

} // namespace

std::string emit_summary(const RunReport& report) {
  std::ostringstream os;
  os << "== " << report.command << " ==\n";
  if (!report.error.empty()) os << "error: " << report.error << "\n";
  if (report.checks.empty()) {
    os << "no checks executed\n";
  } else {
    std::size_t w_name = 5, w_exp = 8, w_obs = 8;
    for (const auto& c : report.checks) {
      w_name = std::max(w_name, c.name.size());
      w_exp = std::max(w_exp, cell(c.expected).size());
      w_obs = std::max(w_obs, cell(c.observed).size());
    }
    auto row = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d) {
      os << a << std::string(w_name - a.size() + 2, ' ') << b << std::string(w_exp - b.size() + 2, ' ') << c
         << std::string(w_obs - c.size() + 2, ' ') << d << "\n";
    };
    row("check", "expected", "observed", "verdict");
    for (const auto& c : report.checks) {
      row(c.name, cell(c.expected), cell(c.observed), c.passed ? "ok" : "MISMATCH");
    }
  }
  for (const auto& c : report.caveats) os << "note: " << c << "\n";
  os << "status: " << to_string(report.status);
  if (report.status == Status::mismatch) os << "  (MISMATCH, exit code 2)";
  if (report.status == Status::error) os << "  (exit code 1)";
  os << "\n";
  return os.str();
}

} // namespace cpn
