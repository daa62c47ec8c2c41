#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "singctrl/experiment.hpp"

namespace fs = std::filesystem;
using namespace singctrl;

namespace {

struct Common {
  std::string config_file;
  std::string out;
  std::optional<int> jobs;
  bool deep = false;
  bool allow_coarse = false;
  bool no_timing = false;
  std::optional<unsigned> seed;
  std::vector<std::string> settings;  // key=value overrides
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_file, "key = value configuration file")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory (default: config, then $SINGCTRL_OUT, then .)");
  app->add_option("--jobs", c.jobs, "concurrent beam runs")->check(CLI::PositiveNumber);
  app->add_flag("--deep", c.deep, "append the two finest eps values");
  app->add_flag("--allow-coarse", c.allow_coarse, "run beam meshes that violate the resolution rule");
  app->add_flag("--no-timing", c.no_timing, "write zero wall times");
  app->add_option("--seed", c.seed, "seed of the property suites");
  app->add_option("--set", c.settings, "override a configuration key, key=value");
}

ExperimentConfig build_config(const Common& o) {
  ExperimentConfig c;
  if (!o.config_file.empty()) c = load_config(o.config_file);
  for (const auto& s : o.settings) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got " + s);
    apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.jobs) c.jobs = *o.jobs;
  if (o.deep) c.deep = true;
  if (o.allow_coarse) c.allow_coarse = true;
  if (o.no_timing) c.timing = false;
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) {
    c.out = o.out;
  } else if (c.out == ".") {
    if (const char* env = std::getenv("SINGCTRL_OUT"); env && *env) c.out = env;
  }
  validate(c);
  fs::create_directories(c.out);
  return c;
}

// Refuses eps values the configured beam mesh cannot resolve.
void check_meshes(const ExperimentConfig& c, const std::vector<double>& eps) {
  if (c.allow_coarse) return;
  for (double e : eps) {
    auto p = beam_problem(c, e);
    check_beam_resolution(e, p.grid);
  }
}

int cmd_table1(const ExperimentConfig& c) {
  const auto eps = c.eps_list();
  check_meshes(c, eps);
  std::cerr << "cascade on " << c.wave_elems << " wave elements\n";
  CascadeResult cascade = run_cascade(cascade_input(c));
  auto rows = run_beam_sweep(c, cascade, eps);
  write_table1(c.out / "table1.csv", rows);
  std::printf("%-8s %6s %12s %12s %12s %12s %9s\n", "eps", "iter", "norm", "E0", "E1", "E2", "seconds");
  for (const auto& r : rows) {
    std::printf("%-8.0e %6d %12.6g %12.6g %12.6g %12.6g %9.1f\n", r.eps, r.iterations, r.norm, r.E0, r.E1, r.E2,
                r.seconds);
    if (!r.error.empty()) std::fprintf(stderr, "eps %g failed: %s\n", r.eps, r.error.c_str());
    else if (!r.converged) std::fprintf(stderr, "eps %g: stopped at the iteration cap\n", r.eps);
  }
  try {
    RateFit f = fit_rates(rows);
    write_rates(c.out / "rates.csv", f);
    std::printf("slopes: E0 %.3f  E1 %.3f  E2 %.3f\n", f.E0, f.E1, f.E2);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "no rates: %s\n", e.what());
  }
  return 0;
}

int cmd_cascade(const ExperimentConfig& c) {
  CascadeResult r = run_cascade(cascade_input(c));
  for (const auto& chk : r.compatibility.checks)
    if (!chk.pass) std::fprintf(stderr, "compatibility: %s residual %.3g\n", chk.name.c_str(), chk.residual);
  for (int j = 0; j <= r.order(); ++j) {
    const auto& L = r.levels[j];
    write_signal_csv(c.out / ("v" + std::to_string(j) + ".csv"), L.v);
    std::printf("v%d  L2 %.6f  iterations %d  final-state %.3g%s\n", j, l2_norm(L.v), L.hum.iterations,
                L.final_residual, r.certified(j) ? "" : "  (not certified)");
  }
  write_signal_csv(c.out / "eta.csv", sample_weight(c.weight(), r.tgrid));
  return 0;
}

int cmd_control(const ExperimentConfig& c, double eps) {
  check_meshes(c, {eps});
  auto p = beam_problem(c, eps);
  HumResult h = solve_beam_control(p);
  write_signal_csv(c.out / "control.csv", h.control);
  std::printf("eps %g  elements %d  steps %d  iterations %d  converged %d\n", eps, p.grid.n_elem, p.tgrid.n_steps,
              h.iterations, h.converged ? 1 : 0);
  std::printf("||sqrt(eps) v|| %.6f  final-state %.3g\n", std::sqrt(eps) * l2_norm(h.control), h.final_residual);
  return 0;
}

int cmd_verify(const ExperimentConfig& c, double courant, bool quick) {
  VerifyOptions o;
  o.seed = c.seed;
  o.courant = courant;
  o.quick = quick;
  bool ok = true;
  std::ofstream csv(c.out / "verify.csv", std::ios::binary);
  csv << "suite,value,threshold,pass\n";
  for (const auto& r : run_verify(o)) {
    ok = ok && r.pass;
    std::printf("%-4s %-34s %11.3e  (threshold %.1e)%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.value,
                r.threshold, r.detail.empty() ? "" : "  ", r.detail.c_str());
    csv << r.name << ',' << r.value << ',' << r.threshold << ',' << (r.pass ? 1 : 0) << '\n';
  }
  return ok ? 0 : 1;
}

int cmd_energy_scaling(const ExperimentConfig& c) {
  TimeGrid tg{c.T, 1000};
  Signal f(tg);
  for (int i = 0; i < tg.size(); ++i) f[i] = std::pow(std::sin(M_PI * tg.t(i) / c.T), 2);
  std::vector<double> eps;
  for (double e : c.eps_list())
    if (e <= 1e-3) eps.push_back(e);
  if (eps.size() < 2) throw std::invalid_argument("energy-scaling needs two eps values at or below 1e-3");
  auto r = layer_source_scaling(eps, f);
  std::ofstream o(c.out / "energy_scaling.csv", std::ios::binary);
  o << "eps,sup_sqrt_energy\n";
  char buf[96];
  for (auto [e, s] : r.points) {
    std::snprintf(buf, sizeof buf, "%.6g,%.10g\n", e, s);
    o << buf;
    std::printf("eps %-8.0e sup sqrt E %.6g\n", e, s);
  }
  std::printf("exponent %.4f\n", r.exponent);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted null controls of the Rayleigh beam and their singular expansion"};
  app.require_subcommand(1);

  Common common;
  auto* table1 = app.add_subcommand("table1", "beam controls per eps, expansion errors and fitted rates");
  auto* cascade = app.add_subcommand("cascade", "wave cascade controls v0, v1, v2");
  auto* control = app.add_subcommand("control", "one beam null control");
  auto* verify = app.add_subcommand("verify", "property suites");
  auto* energy = app.add_subcommand("energy-scaling", "boundary-layer source energy against eps");
  for (auto* s : {table1, cascade, control, verify, energy}) add_common(s, common);

  double eps = 0.0;
  control->add_option("--eps", eps, "singular parameter")->required()->check(CLI::PositiveNumber);
  double courant = 1.0;
  bool quick = false;
  verify->add_option("--courant", courant, "dt/h of the exactness suite (anything but 1 must fail)");
  verify->add_flag("--quick", quick, "skip the eps-sweep suites");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig c = build_config(common);
    if (*table1) return cmd_table1(c);
    if (*cascade) return cmd_cascade(c);
    if (*control) return cmd_control(c, eps);
    if (*verify) return cmd_verify(c, courant, quick);
    if (*energy) return cmd_energy_scaling(c);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "singctrl: %s\n", e.what());
    return 2;
  }
  return 0;
}
