#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "cpn/commands.hpp"

using namespace cpn;

namespace {

Json without_wall_time(Json j) {
  j.erase("wall_time");
  return j;
}

} // namespace

TEST_CASE("decimal strings") {
  CHECK(num(0.1) == "0.1");
  CHECK(num(-0.0) == "0");
  CHECK(num(1e-300) == "1e-300");
  CHECK(std::stod(num(1.0 / 3.0)) == 1.0 / 3.0);
  const auto z = num(cplx{1.5, -2.0});
  CHECK(z["re"] == "1.5");
  CHECK(z["im"] == "-2");
}

TEST_CASE("status and exit codes") {
  CHECK(exit_code(Status::pass) == 0);
  CHECK(exit_code(Status::mismatch) == 2);
  CHECK(exit_code(Status::error) == 1);

  RunReport rep;
  rep.command = "demo";
  rep.finalize();
  CHECK(rep.status == Status::pass);
  CHECK(emit_summary(rep).find("no checks executed") != std::string::npos);

  rep.add_check("a", 1, 1, std::nullopt, true);
  rep.add_check("b", num(0.0), num(1.0), 1e-3, false);
  rep.finalize();
  CHECK(rep.status == Status::mismatch);
  const auto text = emit_summary(rep);
  CHECK(text.find("MISMATCH") != std::string::npos);
  CHECK(text.find("exit code 2") != std::string::npos);

  rep.error = "boom";
  rep.finalize();
  CHECK(rep.status == Status::error);
}

TEST_CASE("report layout") {
  CommandOptions opt;
  opt.n = 3;
  const auto rep = run_command("resonances", opt);
  CHECK(rep.status == Status::pass);
  const auto j = rep.to_json();
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"command", "config", "checks", "results", "caveats", "status", "wall_time"});
  CHECK(j["results"]["roots"] == Json{{"-1", 2}, {"0", 4}, {"1", 2}});
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("name"));
    CHECK(c.contains("expected"));
    CHECK(c.contains("observed"));
    CHECK(c.contains("tolerance"));
    CHECK(c["status"] == "pass");
  }
  const auto text = emit_summary(rep);
  CHECK(text.find("4N-4 total zeros") != std::string::npos);
  CHECK(text.find("+2 w_i^0 wbar_j^0") != std::string::npos);
}

TEST_CASE("every command is deterministic for a fixed seed") {
  CommandOptions opt;
  opt.n = 3;
  opt.order = 6;
  opt.seed = 5;
  opt.samples = 20;
  opt.soliton.p = -3.0;
  for (const auto& name : command_names()) {
    const auto a = run_command(name, opt).to_json();
    const auto b = run_command(name, opt).to_json();
    CHECK_MESSAGE(without_wall_time(a).dump() == without_wall_time(b).dump(), name);
  }
}

TEST_CASE("errors become error reports") {
  CommandOptions opt;
  opt.n = 1;
  CHECK(run_command("exponents", opt).status == Status::error);
  opt.n = 3;
  opt.order = 8;
  opt.jet_order = 9;
  const auto rep = run_command("build-series", opt);
  CHECK(rep.status == Status::error);
  CHECK(rep.error.find("K + 2") != std::string::npos);
  CHECK(run_command("nonsense", CommandOptions{}).status == Status::error);
}

TEST_CASE("auto centre is the first pole above chi0") {
  SolitonParams s;
  s.p = -3.0;
  CHECK(std::abs(auto_center(s) - cplx(0.0, 2.0 * std::numbers::pi)) < 1e-13);
  s.chi0 = cplx{0.5, 1.0};
  CHECK(std::abs(auto_center(s) - cplx(0.5, 1.0 + 2.0 * std::numbers::pi)) < 1e-13);
}

TEST_CASE("build-series report") {
  CommandOptions opt;
  opt.n = 2;
  opt.order = 10;
  opt.seed = 7;
  const auto rep = run_command("build-series", opt);
  CHECK(rep.status == Status::pass);
  CHECK(rep.results["first_integrals"] == 3);
  CHECK(std::abs(std::stod(rep.results["scaling"]["slope"].get<std::string>()) - 6.0) < 0.6);
}
