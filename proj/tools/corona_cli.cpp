// corona: solve, verify and sweep corona problems on the unit disc.
//
// Exit status: 0 success, 1 config or internal error, 2 hypothesis failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "corona/corona.hpp"

namespace fs = std::filesystem;
using namespace corona;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitHypothesis = 2;

struct CommonArgs {
  std::string config_path;
  std::string demo;
  std::string out;
  bool dump_fields = false;
  std::vector<std::string> overrides;  // key=value
};

RunConfig resolve_config(const CommonArgs& a) {
  std::vector<std::pair<std::string, std::string>> kv;
  if (!a.config_path.empty()) {
    std::ifstream is(a.config_path);
    if (!is) throw CoronaError("cannot open config " + a.config_path);
    kv = read_assignments(is, a.config_path);
  }
  if (!a.demo.empty()) kv.emplace_back("demo", a.demo);
  for (const auto& o : a.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw CoronaError("--set expects key=value, got '" + o + "'");
    kv.emplace_back(o.substr(0, eq), o.substr(eq + 1));
  }
  if (!a.out.empty()) kv.emplace_back("output_dir", a.out);
  if (a.dump_fields) kv.emplace_back("dump_fields", "true");
  return parse_config(kv);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CoronaError("cannot write " + path.string());
  os << text;
}

int cmd_solve(const CommonArgs& a) {
  const RunConfig cfg = resolve_config(a);
  const CoronaProblem p = cfg.problem();
  const CauchyPompeiuSolver solver;
  CoronaSolution sol;
  try {
    sol = solve_corona(p, solver, cfg.pipeline());
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis failure: " << e.what() << '\n'
              << "worst point: z = " << format_complex(e.check().point) << '\n';
    return kExitHypothesis;
  }
  fs::create_directories(cfg.output_dir);
  const std::string report = report_string(sol.report);
  write_text(fs::path(cfg.output_dir) / "report.txt", report);
  if (cfg.dump_fields) {
    for (int j = 0; j < p.m; ++j) {
      const std::string s = std::to_string(j + 1);
      write_field_csv((fs::path(cfg.output_dir) / ("h_" + s + ".csv")).string(), sol.h[j]);
      write_field_csv((fs::path(cfg.output_dir) / ("rho_" + s + ".csv")).string(), sol.pou.rho[j]);
      write_field_csv((fs::path(cfg.output_dir) / ("g_" + s + ".csv")).string(), sol.g[j]);
    }
  }
  std::cout << report;
  return kExitOk;
}

int cmd_verify(const CommonArgs& a, const std::string& fields_dir) {
  const RunConfig cfg = resolve_config(a);
  const CoronaProblem p = cfg.problem();
  std::vector<ScalarField> h;
  for (int j = 1; j <= p.m; ++j) {
    const fs::path path = fs::path(fields_dir) / ("h_" + std::to_string(j) + ".csv");
    ScalarField u = read_field_csv(path.string());
    if (!(u.grid() == p.grid)) {
      throw CoronaError(path.string() + ": grid " + std::to_string(u.grid().n_r()) + "x" +
                        std::to_string(u.grid().n_theta()) + " does not match config grid " +
                        std::to_string(p.grid.n_r()) + "x" + std::to_string(p.grid.n_theta()));
    }
    h.push_back(std::move(u));
  }
  SolveReport r = verify_solution(p, h, cfg.r_int);
  r.margin = cfg.margin;
  r.sigma = cfg.sigma;
  r.solver = "none (loaded fields)";
  std::cout << report_string(r);
  return kExitOk;
}

int cmd_certify(const CommonArgs& a) {
  const RunConfig cfg = resolve_config(a);
  const CoronaProblem p = cfg.problem();
  std::vector<Polynomial> polys;
  for (const auto& s : p.specs) {
    const auto* leaf = std::get_if<FunctionSpec::Poly>(&s.node());
    if (!leaf) throw CoronaError("certify needs plain poly: functions, got " + s.to_string());
    polys.push_back(leaf->p);
  }
  const oracles::PolyBezoutCertificate cert = oracles::multi_bezout(polys);
  fs::create_directories(cfg.output_dir);
  std::ostringstream os;
  oracles::write_certificate(os, cert);
  write_text(fs::path(cfg.output_dir) / "certificate.txt", os.str());
  if (cfg.dump_fields) {
    for (int j = 0; j < p.m; ++j) {
      const ScalarField u = FunctionSpec::polynomial(cert.cofactors[j]).sample(p.grid);
      write_field_csv((fs::path(cfg.output_dir) / ("h_" + std::to_string(j + 1) + ".csv")).string(), u);
    }
  }
  std::cout << os.str() << "# symbolic residual = " << format_real(cert.residual()) << '\n';
  return kExitOk;
}

std::vector<std::pair<int, int>> parse_resolutions(const std::string& spec) {
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) throw CoronaError("resolution '" + item + "' is not of the form NRxNTHETA");
    try {
      out.emplace_back(std::stoi(item.substr(0, x)), std::stoi(item.substr(x + 1)));
    } catch (const std::exception&) {
      throw CoronaError("resolution '" + item + "' is not of the form NRxNTHETA");
    }
  }
  if (out.size() < 2) throw CoronaError("sweep needs at least two resolutions");
  return out;
}

int cmd_sweep(const CommonArgs& a, const std::string& resolutions) {
  const auto res = parse_resolutions(resolutions);
  RunConfig base = resolve_config(a);
  const CauchyPompeiuSolver solver;
  std::ostringstream table;
  table << "resolution,residual_sup,max_holo_defect,solver_sup_ratio,status\n";
  for (auto [nr, nt] : res) {
    RunConfig cfg = base;
    cfg.n_r = nr;
    cfg.n_theta = nt;
    table << nr << 'x' << nt << ',';
    try {
      cfg.validate();
      const CoronaSolution sol = solve_corona(cfg.problem(), solver, cfg.pipeline());
      table << format_real(sol.report.residual_sup) << ',' << format_real(sol.report.max_holo_defect()) << ','
            << format_real(sol.report.solver_stats.sup_ratio()) << ",ok\n";
    } catch (const std::exception& e) {
      std::string msg = e.what();
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      table << "nan,nan,nan,error: " << msg << '\n';
    }
  }
  fs::create_directories(base.output_dir);
  write_text(fs::path(base.output_dir) / "sweep.csv", table.str());
  std::cout << table.str();
  return kExitOk;
}

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--config", a.config_path, "key = value config file");
  sub->add_option("--demo", a.demo, "compiled-in preset: wolff-trivial, squares, triple, single");
  sub->add_option("--out", a.out, "output directory (overrides output_dir)");
  sub->add_option("--set", a.overrides, "override a config key, e.g. --set epsilon=0.5")->take_all();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corona problem solver on the unit disc"};
  app.require_subcommand(1);

  CommonArgs solve_args, verify_args, sweep_args, certify_args;
  std::string fields_dir, resolutions;

  auto* solve = app.add_subcommand("solve", "solve a corona problem and write report.txt");
  add_common(solve, solve_args);
  solve->add_flag("--dump-fields", solve_args.dump_fields, "write h_j, rho_j, g_j CSV dumps");

  auto* verify = app.add_subcommand("verify", "check sum f_j h_j = 1 and holomorphy for dumped h_j fields");
  add_common(verify, verify_args);
  verify->add_option("--fields", fields_dir, "directory holding h_<j>.csv")->required();

  auto* sweep = app.add_subcommand("sweep", "resolution sweep, writes sweep.csv");
  add_common(sweep, sweep_args);
  sweep->add_option("--resolutions", resolutions, "comma list like 64x128,128x256")->required();

  auto* certify = app.add_subcommand("certify", "polynomial Bezout cofactors for the data (oracle)");
  add_common(certify, certify_args);
  certify->add_flag("--dump-fields", certify_args.dump_fields, "write sampled cofactors as h_<j>.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (verify->parsed()) return cmd_verify(verify_args, fields_dir);
    if (sweep->parsed()) return cmd_sweep(sweep_args, resolutions);
    if (certify->parsed()) return cmd_certify(certify_args);
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis failure: " << e.what() << '\n';
    return kExitHypothesis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
