// Command-line front end: one subcommand per analysis, JSON report + text summary.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cpn/commands.hpp"
#include "cpn/errors.hpp"

namespace {

// Accepts "x", "x+yi", "x-yi", "yi" or "x,y".
cpn::cplx parse_complex(const std::string& text) {
  const auto fail = [&] { throw CLI::ValidationError("not a complex number: " + text); };
  if (const auto comma = text.find(','); comma != std::string::npos) {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  }
  const char* s = text.c_str();
  char* end = nullptr;
  const double first = std::strtod(s, &end);
  if (end == s) fail();
  const std::string rest(end);
  if (rest.empty()) return {first, 0.0};
  if (rest == "i") return {0.0, first};
  char* end2 = nullptr;
  const double second = std::strtod(rest.c_str(), &end2);
  if (end2 == rest.c_str() || std::string(end2) != "i" || (rest[0] != '+' && rest[0] != '-')) fail();
  return {first, second};
}

struct Raw {
  std::string a = "1", b = "2", chi0 = "0", d = "0", center = "auto";
  int jet_order = -1;
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Painleve analysis of the CP^(N-1) sigma model in affine variables"};
  app.require_subcommand(1);
  cpn::CommandOptions opt;
  Raw raw;
  std::string out;
  bool json = true;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out, "report path (default: $REPORT_DIR/<command>.json, else stdout)");
    sub->add_flag("--json,!--no-json", json, "emit the JSON report (default on)");
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--n", opt.n, "number of homogeneous components N (>= 2)");
    sub->add_option("--seed", opt.seed, "random seed");
  };
  auto add_series = [&](CLI::App* sub) {
    add_model(sub);
    sub->add_option("--order", opt.order, "truncation order K");
    sub->add_option("--jet-order", raw.jet_order, "Taylor order M of the coefficients (default K+2)");
    sub->add_option("--tol", opt.tol, "consistency tolerance at resonances");
    sub->add_option("--radii", opt.radii, "radii |Phi| of the scaling certificate");
  };
  auto add_soliton = [&](CLI::App* sub) {
    sub->add_option("--p", opt.soliton.p, "soliton parameter p");
    sub->add_option("--a", raw.a, "complex parameter a");
    sub->add_option("--b", raw.b, "complex parameter b");
    sub->add_option("--chi0", raw.chi0, "complex centre chi0");
    sub->add_option("--d", raw.d, "complex phase constant d");
  };

  std::map<std::string, CLI::App*> subs;
  for (const auto& name : cpn::command_names()) subs[name] = app.add_subcommand(name);
  subs["exponents"]->description("lowest-order exponents and the determinant of B");
  subs["resonances"]->description("resonances of the order-k operator");
  subs["build-series"]->description("construct the Laurent series and check compatibility");
  subs["verify-series"]->description("residual scaling certificate of the truncated series");
  subs["counterexample"]->description("explicit N = 2 solution: residuals and singular loci");
  subs["monodromy"]->description("analytic continuation around a branch point");
  add_model(subs["exponents"]);
  add_model(subs["resonances"]);
  add_series(subs["build-series"]);
  add_series(subs["verify-series"]);
  add_soliton(subs["counterexample"]);
  subs["counterexample"]->add_option("--seed", opt.seed, "seed of the sample points");
  subs["counterexample"]->add_option("--samples", opt.samples, "number of regular sample points");
  add_soliton(subs["monodromy"]);
  subs["monodromy"]->add_option("--center", raw.center, "loop centre in chi, or 'auto'");
  subs["monodromy"]->add_option("--radius", opt.radius, "loop radius");
  subs["monodromy"]->add_option("--steps", opt.steps, "polygon steps around the loop");
  for (auto& [name, sub] : subs) add_common(sub);

  try {
    app.parse(argc, argv);
    opt.soliton.a = parse_complex(raw.a);
    opt.soliton.b = parse_complex(raw.b);
    opt.soliton.chi0 = parse_complex(raw.chi0);
    opt.soliton.d = parse_complex(raw.d);
    if (raw.center != "auto") opt.center = parse_complex(raw.center);
    if (raw.jet_order >= 0) opt.jet_order = raw.jet_order;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const auto report = cpn::run_command(command, opt);
  if (!report.error.empty()) std::cerr << "error: " << report.error << "\n";

  if (out.empty()) {
    if (const char* dir = std::getenv("REPORT_DIR"); dir && *dir) {
      out = (std::filesystem::path(dir) / (command + ".json")).string();
    }
  }
  const std::string summary = cpn::emit_summary(report);
  if (!json) {
    std::cout << summary;
  } else if (out.empty()) {
    std::cout << report.to_json().dump(2) << "\n";
    std::cerr << summary;
  } else {
    const auto parent = std::filesystem::path(out).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream f(out);
    if (!f) {
      std::cerr << "error: cannot write " << out << "\n";
      return 1;
    }
    f << report.to_json().dump(2) << "\n";
    std::cout << summary;
  }
  return cpn::exit_code(report.status);
}
