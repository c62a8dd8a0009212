// revhom: reversible-homoclinic bifurcation toolkit front end.
//
// Subcommands: resonance, melnikov, solve, continue, monodromy, figures.
// Every value can come from a JSON config file (--config); explicit flags win.
// All outputs are deterministic for a fixed config.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "revhom/experiments.hpp"
#include "revhom/monodromy.hpp"
#include "revhom/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace revhom;

namespace {

std::string g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("--config", "cannot open " + path);
  nlohmann::json j;
  f >> j;
  return j;
}

// config value fills in any option the user did not pass on the command line
template <typename T>
void cfg(CLI::App* cmd, const nlohmann::json& c, const std::string& key, T& var) {
  CLI::Option* opt = cmd->get_option("--" + key);
  if (opt->count() == 0 && c.contains(key)) var = c.at(key).get<T>();
}

std::vector<int> parse_ells(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  if (out.empty()) throw CLI::ValidationError("--ell", "empty list");
  return out;
}

std::string config_line(const ordered_json& j) { return j.dump(); }

duffing::ExampleParams resolve_params(double s, int ell, double beta1, double beta2,
                                      double beta3) {
  duffing::ExampleParams p;
  p.s = s;
  p.ell = ell;
  p.beta1 = std::isnan(beta1) ? duffing::resonance_beta1(s, ell) : beta1;
  p.beta2 = beta2;
  p.beta3 = beta3;
  return p;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << body;
}

void branch_svg(const std::string& path, const Branch& br, const std::string& xlabel) {
  SvgPlot plot;
  plot.title = "branch in " + br.param_name;
  plot.xlabel = xlabel;
  plot.ylabel = "x2(0)";
  SvgSeries line;
  for (const auto& pt : br.points) {
    line.x.push_back(pt.param);
    line.y.push_back(pt.measures.x2_at_0);
  }
  SvgSeries marks;
  marks.color = "#c03020";
  marks.markers = true;
  for (const auto& sp : br.specials) {
    marks.x.push_back(sp.param);
    // nearest recorded measure for the marker height
    double best = 1e300, y = 0;
    for (const auto& pt : br.points)
      if (std::abs(pt.arclength - sp.arclength) < best) {
        best = std::abs(pt.arclength - sp.arclength);
        y = pt.measures.x2_at_0;
      }
    marks.y.push_back(y);
  }
  plot.series.push_back(line);
  if (!marks.x.empty()) plot.series.push_back(marks);
  write_svg(path, plot);
}

void profile_csv(const std::string& path,
                 const std::vector<std::pair<double, Vec>>& samples,
                 const std::string& comment) {
  std::ostringstream o;
  o << "# " << comment << "\n";
  o << "t,x1,x2,x3,x4\n";
  for (const auto& [t, x] : samples) {
    o << g12(t);
    for (int k = 0; k < x.size(); ++k) o << ',' << g12(x[k]);
    o << '\n';
  }
  write_text(path, o.str());
}

void profile_svg(const std::string& path,
                 const std::vector<std::pair<double, Vec>>& samples,
                 const std::string& title) {
  SvgPlot plot;
  plot.title = title;
  plot.xlabel = "t";
  plot.ylabel = "x1, x2";
  SvgSeries s1, s2;
  s2.color = "#c03020";
  for (const auto& [t, x] : samples) {
    s1.x.push_back(t);
    s1.y.push_back(x[0]);
    s2.x.push_back(t);
    s2.y.push_back(x[1]);
  }
  plot.series = {s1, s2};
  write_svg(path, plot);
}

// ---------------------------------------------------------------- resonance

int run_resonance(double s, const std::string& ells) {
  for (int ell : parse_ells(ells))
    std::cout << g12(duffing::resonance_beta1(s, ell)) << "\n";
  return 0;
}

// ----------------------------------------------------------------- melnikov

int run_melnikov(double s, int ell, double beta1, double beta2, double beta3,
                 const std::string& mode_name, const std::string& out) {
  Mode mode;
  if (mode_name == "saddle-node")
    mode = Mode::saddle_node;
  else if (mode_name == "transcritical")
    mode = Mode::transcritical;
  else if (mode_name == "pitchfork")
    mode = Mode::pitchfork;
  else
    throw CLI::ValidationError("--mode", "unknown mode " + mode_name);
  duffing::ExampleParams p = resolve_params(s, ell, beta1, beta2, beta3);
  MelnikovReport rep = example_report(p, mode);
  std::string j = rep.to_json();
  std::cout << j << "\n";
  if (!out.empty()) write_text(out, j + "\n");
  return 0;
}

// -------------------------------------------------------------------- solve

int run_solve(double s, int ell, double beta1, double beta2, double beta3, double T,
              int N, double perturb, const std::string& out) {
  duffing::ExampleParams p = resolve_params(s, ell, beta1, beta2, beta3);
  HomoclinicBVP bvp = make_bvp(duffing::make_system(p), T, N);
  Vec guess = sample_guess(bvp, [&](double t) {
    Vec x = duffing::homoclinic_exact(t);
    return Vec(x * (1.0 + perturb));
  });
  HomoclinicOrbit orb = solve(bvp, guess);
  ordered_json cfgj = {{"cmd", "solve"}, {"s", p.s},         {"ell", p.ell},
                       {"beta1", p.beta1}, {"beta2", p.beta2}, {"beta3", p.beta3},
                       {"T", T},           {"N", N}};
  if (!out.empty()) write_orbit_csv(out, bvp, orb, config_line(cfgj));
  ordered_json rj;
  rj["residual_inf"] = orb.residual_inf;
  rj["newton_iters"] = orb.newton_iters;
  rj["x2_at_0"] = orb.measures.x2_at_0;
  rj["max_x2"] = orb.measures.max_x2;
  rj["min_x2"] = orb.measures.min_x2;
  rj["l2_norm"] = orb.measures.l2_norm;
  std::cout << rj.dump(2) << "\n";
  return 0;
}

// ----------------------------------------------------------------- continue

int run_continue(const std::string& param, double s, int ell, double beta3, double T,
                 int N, int steps, const std::string& out, bool svg) {
  ordered_json cfgj = {{"cmd", "continue"}, {"param", param}, {"s", s},
                       {"ell", ell},        {"beta3", beta3}, {"T", T},
                       {"N", N},            {"steps", steps}};
  std::string comment = config_line(cfgj);
  ordered_json summary;
  if (param == "beta2") {
    FoldExperiment ex = run_fold_experiment(s, ell, beta3, N, T, steps);
    write_branch_csv(out + ".csv", ex.branch, comment);
    if (svg) branch_svg(out + ".svg", ex.branch, "beta2");
    summary["branch"] = nlohmann::json::parse(branch_summary_json(ex.branch));
    summary["report"] = nlohmann::json::parse(ex.report.to_json());
    summary["fold_param"] = ex.consistency.special_param;
    summary["fit_exponent"] = ex.consistency.fit_exponent;
    summary["location_ok"] = ex.consistency.location_ok;
    summary["side_consistent"] = ex.consistency.side_consistent;
  } else if (param == "beta1" && beta3 != 0.0) {
    TranscriticalExperiment ex = run_transcritical_experiment(s, ell, beta3, N, T);
    write_branch_csv(out + "_trivial.csv", ex.trivial_branch, comment);
    write_branch_csv(out + "_crossing.csv", ex.crossing_branch, comment);
    if (svg) {
      branch_svg(out + "_trivial.svg", ex.trivial_branch, "beta1");
      branch_svg(out + "_crossing.svg", ex.crossing_branch, "beta1");
    }
    summary["trivial"] = nlohmann::json::parse(branch_summary_json(ex.trivial_branch));
    summary["crossing"] = nlohmann::json::parse(branch_summary_json(ex.crossing_branch));
    summary["report"] = nlohmann::json::parse(ex.report.to_json());
    summary["bp_param"] = ex.bp_param;
    summary["crossing_slope"] = ex.crossing_slope;
  } else if (param == "beta1") {
    PitchforkExperiment ex = run_pitchfork_experiment(s, ell, N, T, steps);
    write_branch_csv(out + "_trivial.csv", ex.trivial_branch, comment);
    write_branch_csv(out + "_a.csv", ex.branch_a, comment);
    write_branch_csv(out + "_b.csv", ex.branch_b, comment);
    if (svg) {
      branch_svg(out + "_a.svg", ex.branch_a, "beta1");
      branch_svg(out + "_b.svg", ex.branch_b, "beta1");
    }
    summary["trivial"] = nlohmann::json::parse(branch_summary_json(ex.trivial_branch));
    summary["branch_a"] = nlohmann::json::parse(branch_summary_json(ex.branch_a));
    summary["branch_b"] = nlohmann::json::parse(branch_summary_json(ex.branch_b));
    summary["report"] = nlohmann::json::parse(ex.report.to_json());
    summary["bp_param"] = ex.bp_param;
    summary["side_consistent"] = ex.consistency.side_consistent;
    summary["one_sided"] = ex.consistency.one_sided;
  } else {
    throw CLI::ValidationError("--param", "must be beta1 or beta2");
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- monodromy

int run_monodromy(int block, double s, int ell, double beta1, double eps,
                  const std::string& out) {
  duffing::ExampleParams p = resolve_params(s, ell, beta1, 0.0, 0.0);
  ChartSpec cp, cm;
  cp.chart = +1;
  cm.chart = -1;
  cp.eps = cm.eps = eps;
  MonodromyResult mp = monodromy_matrix(block, p, cp);
  MonodromyResult mm = monodromy_matrix(block, p, cm);
  Vec2c vb = block == 1 ? Vec2c(0.0, 1.0) : Vec2c(1.0, 0.0);
  ordered_json j;
  j["block"] = block;
  j["s"] = p.s;
  j["beta1"] = p.beta1;
  j["eps"] = eps;
  j["sigma_plus"] = nlohmann::json::parse(monodromy_json(mp));
  j["sigma_minus"] = nlohmann::json::parse(monodromy_json(mm));
  bool at_res = false;
  for (int l = 0; l < 6; ++l)
    if (std::abs(p.beta1 - duffing::resonance_beta1(s, l)) < 1e-9) at_res = true;
  if (block == 1 || at_res) {
    TriangDiagnosis d = check_triangularizable(mp, mm, vb);
    j["min_eigenline_angle"] = d.min_angle;
    j["common_invariant_line"] = d.common_line;
    j["bounded_direction_fixed"] = d.bounded_fixed;
    j["fixed_residual"] = d.fixed_residual;
  } else {
    // off resonance there is no known bounded direction; report angles only
    double mina = 1e300;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        Vec2c u = mp.eigenvectors.col(a).normalized(),
              v = mm.eigenvectors.col(b).normalized();
        double c = std::abs((u.adjoint() * v)(0, 0));
        mina = std::min(mina, std::acos(std::min(1.0, c)));
      }
    j["min_eigenline_angle"] = mina;
    j["common_invariant_line"] = mina <= 1e-5;
  }
  std::string body = j.dump(2);
  std::cout << body << "\n";
  if (!out.empty()) write_text(out, body + "\n");
  return 0;
}

// ------------------------------------------------------------------ figures

int run_figures(const std::string& outdir, double s, double beta3, int N, double T,
                int steps) {
  fs::create_directories(outdir);
  auto path = [&](const std::string& name) { return (fs::path(outdir) / name).string(); };
  ordered_json summary;

  for (int ell = 0; ell < 3; ++ell) {
    ordered_json cfgj = {{"cmd", "figures"}, {"panel", "fold"}, {"s", s},
                         {"ell", ell},       {"beta3", beta3},  {"N", N},
                         {"T", T}};
    FoldExperiment ex = run_fold_experiment(s, ell, beta3, N, T, steps);
    std::string tag = "fold_ell" + std::to_string(ell);
    write_branch_csv(path(tag + ".csv"), ex.branch, config_line(cfgj));
    branch_svg(path(tag + ".svg"), ex.branch, "beta2");
    profile_csv(path("orbit_ell" + std::to_string(ell) + ".csv"), ex.profile,
                config_line(cfgj));
    profile_svg(path("orbit_ell" + std::to_string(ell) + ".svg"), ex.profile,
                "orbit profile, ell=" + std::to_string(ell));
    ordered_json e;
    e["fold_param"] = ex.consistency.special_param;
    e["fit_exponent"] = ex.consistency.fit_exponent;
    e["side_consistent"] = ex.consistency.side_consistent;
    summary["fold_ell" + std::to_string(ell)] = e;
  }

  {
    ordered_json cfgj = {{"cmd", "figures"}, {"panel", "transcritical"}, {"s", s},
                         {"beta3", beta3},   {"N", N},                   {"T", T}};
    TranscriticalExperiment ex = run_transcritical_experiment(s, 0, beta3, N, T);
    write_branch_csv(path("transcritical_trivial.csv"), ex.trivial_branch,
                     config_line(cfgj));
    write_branch_csv(path("transcritical_crossing.csv"), ex.crossing_branch,
                     config_line(cfgj));
    branch_svg(path("transcritical.svg"), ex.crossing_branch, "beta1");
    summary["transcritical"] = {{"bp_param", ex.bp_param},
                                {"crossing_slope", ex.crossing_slope}};
  }

  {
    ordered_json cfgj = {{"cmd", "figures"}, {"panel", "pitchfork"}, {"s", s},
                         {"N", N},           {"T", T}};
    PitchforkExperiment ex = run_pitchfork_experiment(s, 0, N, T, steps);
    write_branch_csv(path("pitchfork_trivial.csv"), ex.trivial_branch,
                     config_line(cfgj));
    write_branch_csv(path("pitchfork_a.csv"), ex.branch_a, config_line(cfgj));
    write_branch_csv(path("pitchfork_b.csv"), ex.branch_b, config_line(cfgj));
    branch_svg(path("pitchfork_a.svg"), ex.branch_a, "beta1");
    branch_svg(path("pitchfork_b.svg"), ex.branch_b, "beta1");
    summary["pitchfork"] = {{"bp_param", ex.bp_param},
                            {"side_consistent", ex.consistency.side_consistent},
                            {"one_sided", ex.consistency.one_sided}};
  }

  write_text(path("summary.json"), summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reversible-homoclinic bifurcation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override it")
      ->expected(1);

  double s = 2.0, beta1 = NAN, beta2 = 0.0, beta3 = 0.0, T = 20.0, eps = 1e-4;
  double perturb = 0.0;
  int ell = 0, N = 400, block = 2, steps = 28;
  std::string ells = "0,1,2", mode = "saddle-node", out, param = "beta2";
  std::string outdir = "figures";
  bool svg = false;

  auto* c_res = app.add_subcommand("resonance", "resonant beta1 values");
  c_res->add_option("--s", s, "saddle rate parameter s");
  c_res->add_option("--ell", ells, "comma-separated mode indices");

  auto* c_mel = app.add_subcommand("melnikov", "bifurcation coefficient report");
  c_mel->add_option("--s", s, "");
  c_mel->add_option("--ell", ell, "");
  c_mel->add_option("--beta1", beta1, "defaults to resonance(s, ell)");
  c_mel->add_option("--beta2", beta2, "");
  c_mel->add_option("--beta3", beta3, "");
  c_mel->add_option("--mode", mode, "saddle-node | transcritical | pitchfork");
  c_mel->add_option("--out", out, "also write the JSON report here");

  auto* c_sol = app.add_subcommand("solve", "single homoclinic BVP solve");
  c_sol->add_option("--s", s, "");
  c_sol->add_option("--ell", ell, "");
  c_sol->add_option("--beta1", beta1, "defaults to resonance(s, ell)");
  c_sol->add_option("--beta2", beta2, "");
  c_sol->add_option("--beta3", beta3, "");
  c_sol->add_option("--T", T, "half-interval length");
  c_sol->add_option("--N", N, "collocation intervals");
  c_sol->add_option("--perturb", perturb, "relative guess perturbation");
  c_sol->add_option("--out", out, "orbit CSV path");

  auto* c_con = app.add_subcommand("continue", "branch continuation experiment");
  c_con->add_option("--param", param, "beta1 or beta2");
  c_con->add_option("--s", s, "");
  c_con->add_option("--ell", ell, "");
  c_con->add_option("--beta3", beta3, "");
  c_con->add_option("--T", T, "");
  c_con->add_option("--N", N, "");
  c_con->add_option("--steps", steps, "steps per branch leg");
  c_con->add_option("--out", out, "output file prefix")->default_str("branch");
  c_con->add_flag("--svg", svg, "also render SVG diagrams");

  auto* c_mon = app.add_subcommand("monodromy", "complex-loop monodromy probe");
  c_mon->add_option("--block", block, "variational block, 1 or 2");
  c_mon->add_option("--s", s, "");
  c_mon->add_option("--ell", ell, "");
  c_mon->add_option("--beta1", beta1, "defaults to resonance(s, ell)");
  c_mon->add_option("--eps", eps, "chart circle radius");
  c_mon->add_option("--out", out, "also write the JSON report here");

  double beta3_fig = 4.0;
  int N_fig = 200;
  auto* c_fig = app.add_subcommand("figures", "emit all diagram and profile data");
  c_fig->add_option("--outdir", outdir, "output directory");
  c_fig->add_option("--s", s, "");
  c_fig->add_option("--beta3", beta3_fig, "");
  c_fig->add_option("--N", N_fig, "");
  c_fig->add_option("--T", T, "");
  c_fig->add_option("--steps", steps, "steps per branch leg");

  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json c = load_config(config_path);
    if (c_res->parsed()) {
      cfg(c_res, c, "s", s);
      cfg(c_res, c, "ell", ells);
      return run_resonance(s, ells);
    }
    if (c_mel->parsed()) {
      cfg(c_mel, c, "s", s);
      cfg(c_mel, c, "ell", ell);
      cfg(c_mel, c, "beta1", beta1);
      cfg(c_mel, c, "beta2", beta2);
      cfg(c_mel, c, "beta3", beta3);
      cfg(c_mel, c, "mode", mode);
      cfg(c_mel, c, "out", out);
      return run_melnikov(s, ell, beta1, beta2, beta3, mode, out);
    }
    if (c_sol->parsed()) {
      cfg(c_sol, c, "s", s);
      cfg(c_sol, c, "ell", ell);
      cfg(c_sol, c, "beta1", beta1);
      cfg(c_sol, c, "beta2", beta2);
      cfg(c_sol, c, "beta3", beta3);
      cfg(c_sol, c, "T", T);
      cfg(c_sol, c, "N", N);
      cfg(c_sol, c, "perturb", perturb);
      cfg(c_sol, c, "out", out);
      return run_solve(s, ell, beta1, beta2, beta3, T, N, perturb, out);
    }
    if (c_con->parsed()) {
      cfg(c_con, c, "param", param);
      cfg(c_con, c, "s", s);
      cfg(c_con, c, "ell", ell);
      cfg(c_con, c, "beta3", beta3);
      cfg(c_con, c, "T", T);
      cfg(c_con, c, "N", N);
      cfg(c_con, c, "steps", steps);
      cfg(c_con, c, "out", out);
      if (out.empty()) out = "branch";
      return run_continue(param, s, ell, beta3, T, N, steps, out, svg);
    }
    if (c_mon->parsed()) {
      cfg(c_mon, c, "block", block);
      cfg(c_mon, c, "s", s);
      cfg(c_mon, c, "ell", ell);
      cfg(c_mon, c, "beta1", beta1);
      cfg(c_mon, c, "eps", eps);
      cfg(c_mon, c, "out", out);
      return run_monodromy(block, s, ell, beta1, eps, out);
    }
    if (c_fig->parsed()) {
      cfg(c_fig, c, "outdir", outdir);
      cfg(c_fig, c, "s", s);
      cfg(c_fig, c, "beta3", beta3_fig);
      cfg(c_fig, c, "N", N_fig);
      cfg(c_fig, c, "T", T);
      cfg(c_fig, c, "steps", steps);
      return run_figures(outdir, s, beta3_fig, N_fig, T, steps);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
