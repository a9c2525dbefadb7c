#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "klshell/bench.hpp"
#include "klshell/verify.hpp"

namespace fs = std::filesystem;
using namespace klshell;

namespace {

struct Common {
  std::string scenario;
  std::string out;
  std::optional<int> steps;
};

// Writes text to DIR/name, or to stdout when no directory was given.
void emit(const std::string& dir, const std::string& name, const std::string& text) {
  if (dir.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(dir);
  const fs::path p = fs::path(dir) / name;
  std::ofstream os(p);
  if (!os) throw Error("cannot write " + p.string());
  os << text;
  std::cerr << "wrote " << p.string() << '\n';
}

std::string csv_text(const std::vector<std::string>& cols, const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  write_csv(os, cols, rows);
  return os.str();
}

std::string stem(const Scenario& sc) { return sc.name; }

ShellModel parse_model_token(const std::string& tok) {
  const auto colon = tok.find(':');
  ShellModel m{parse_pipeline(tok.substr(0, colon)), 0};
  if (colon != std::string::npos) {
    if (m.pipeline != Pipeline::NP) throw Error("only np takes a Gauss point count: " + tok);
    m.n_gp = std::stoi(tok.substr(colon + 1));
    if (m.n_gp < 1) throw Error("Gauss point count must be positive: " + tok);
  }
  return m;
}

int cmd_run(const Common& c, const std::string& pipeline, int n_gp, const std::string& mesh_out) {
  Scenario sc = load_scenario(c.scenario);
  if (!pipeline.empty()) sc.model = {parse_pipeline(pipeline), sc.model.n_gp};
  if (n_gp > 0) sc.model.n_gp = n_gp;
  if (!mesh_out.empty()) {
    std::ofstream os(mesh_out);
    if (!os) throw Error("cannot write " + mesh_out);
    write_mesh(os, build_problem(sc).problem.mesh);
  }
  RunOptions ro;
  ro.steps = c.steps;
  try {
    const RunResult r = run_scenario(sc, ro);
    std::ostringstream rep;
    write_report(rep, sc, r);
    rep << "seconds: " << std::setprecision(4) << r.seconds << '\n';
    emit(c.out, stem(sc) + ".csv", csv_text(r.columns, r.rows));
    if (c.out.empty())
      std::cerr << rep.str();
    else
      emit(c.out, stem(sc) + "_report.txt", rep.str());
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  } catch (const NonConvergence& e) {
    RunResult r;
    r.report = e.report;
    r.warnings = scenario_warnings(sc);
    std::ostringstream rep;
    write_report(rep, sc, r);
    std::cerr << rep.str() << "error: solver failure: " << e.what() << '\n';
    if (!c.out.empty()) emit(c.out, stem(sc) + "_report.txt", rep.str());
    return 3;
  }
  return 0;
}

int cmd_compare(const Common& c, const std::string& list) {
  const Scenario sc = load_scenario(c.scenario);
  std::vector<ShellModel> models;
  std::stringstream ss(list);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) models.push_back(parse_model_token(tok));
  RunOptions ro;
  ro.steps = c.steps;
  const CompareResult r = compare_pipelines(sc, models, ro);
  std::ostringstream sum;
  sum << "scenario: " << sc.name << '\n' << "reference: " << r.labels.front() << '\n';
  for (std::size_t i = 1; i < r.labels.size(); ++i)
    sum << "max relative deviation " << r.labels[i] << " vs " << r.labels.front() << ": " << std::setprecision(6)
        << r.deviation[i] << '\n';
  for (std::size_t i = 0; i < r.runs.size(); ++i)
    for (const auto& w : r.runs[i].warnings) sum << "warning (" << r.labels[i] << "): " << w << '\n';
  emit(c.out, stem(sc) + "_compare.csv", csv_text(r.columns, r.rows));
  if (c.out.empty())
    std::cerr << sum.str();
  else {
    emit(c.out, stem(sc) + "_compare.txt", sum.str());
    std::cout << sum.str();
  }
  return 0;
}

int cmd_sweep(const Common& c, const std::string& axis, const std::vector<double>& values) {
  const Scenario sc = load_scenario(c.scenario);
  SweepAxis ax;
  if (axis == "n_gp")
    ax = SweepAxis::GaussPoints;
  else if (axis == "thickness_ratio")
    ax = SweepAxis::ThicknessRatio;
  else
    throw Error("unknown sweep axis '" + axis + "' (expected n_gp or thickness_ratio)");
  RunOptions ro;
  ro.steps = c.steps;
  const SweepResult r = sweep(sc, ax, values, ro);
  emit(c.out, stem(sc) + "_sweep_" + axis + ".csv", csv_text(r.columns, r.rows));
  return 0;
}

int cmd_verify(const VerifyOptions& opt, const std::string& out) {
  const VerifyReport rep = verify_all(opt);
  std::ostringstream os;
  os << "seed: " << opt.seed << '\n';
  for (const VerifyCheck& c : rep.checks)
    os << (c.pass ? "PASS " : "FAIL ") << c.suite << ": " << c.name << "  value " << std::setprecision(3) << c.value
       << "  limit " << c.limit << '\n';
  os << (rep.all_pass() ? "all checks passed" : "verification FAILED") << " in " << std::setprecision(3) << rep.seconds
     << " s\n";
  std::cout << os.str();
  if (!out.empty()) emit(out, "verify_report.txt", os.str());
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear isogeometric Kirchhoff-Love shell benchmarks"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--scenario", common.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    s->add_option("--out", common.out, "output directory (default: CSV on stdout)");
    s->add_option("--steps", common.steps, "override the number of load steps")->check(CLI::PositiveNumber);
  };

  std::string pipeline, mesh_out;
  int n_gp = 0;
  CLI::App* run = app.add_subcommand("run", "solve one scenario and write its load curve");
  add_common(run);
  run->add_option("--pipeline", pipeline, "override the pipeline")->check(CLI::IsMember({"np", "ap", "dd"}));
  run->add_option("--gauss-points", n_gp, "thickness Gauss points for np")->check(CLI::PositiveNumber);
  run->add_option("--mesh-out", mesh_out, "also dump the analysis mesh to this file");

  std::string list = "np,ap,dd";
  CLI::App* cmp = app.add_subcommand("compare", "run several pipelines on one scenario");
  add_common(cmp);
  cmp->add_option("--pipelines", list, "comma-separated list, np:N selects N Gauss points")->capture_default_str();

  std::string axis;
  std::vector<double> values;
  CLI::App* sw = app.add_subcommand("sweep", "error against the reference pipeline along an axis");
  add_common(sw);
  sw->add_option("--axis", axis, "n_gp or thickness_ratio")->required();
  sw->add_option("--values", values, "axis values")->required()->delimiter(',');

  VerifyOptions vopt;
  std::string vout;
  CLI::App* ver = app.add_subcommand("verify", "run the property suites at random states");
  ver->add_option("--seed", vopt.seed, "random seed")->capture_default_str();
  ver->add_option("--states", vopt.states, "random states per material and pipeline")->capture_default_str()
      ->check(CLI::PositiveNumber);
  ver->add_option("--out", vout, "also write the report to this directory");
  ver->add_option("--corrupt-tangent", vopt.corrupt_tangent)->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(common, pipeline, n_gp, mesh_out);
    if (*cmp) return cmd_compare(common, list);
    if (*sw) return cmd_sweep(common, axis, values);
    if (*ver) return cmd_verify(vopt, vout);
  } catch (const ParseError& e) {
    std::cerr << "error: " << common.scenario << ": " << e.what() << '\n';
    return 2;
  } catch (const NonConvergence& e) {
    std::cerr << "error: solver failure: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
