#include "singctrl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace singctrl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw std::invalid_argument("bad number for " + key + ": " + v);
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  double x = parse_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw std::invalid_argument("bad integer for " + key + ": " + v);
  return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("bad boolean for " + key + ": " + v);
}

std::string fmt(double x, int digits) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<double> ExperimentConfig::eps_list() const {
  std::vector<double> e = eps;
  if (deep)
    for (double d : kDeepEps)
      if (std::find(e.begin(), e.end(), d) == e.end()) e.push_back(d);
  return e;
}

void apply_setting(ExperimentConfig& c, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in), v = trim(value_in);
  if (key == "T") {
    c.T = parse_double(key, v);
  } else if (key == "weight_a") {
    c.weight_a = parse_double(key, v);
  } else if (key == "weight_p") {
    c.weight_p = parse_double(key, v);
  } else if (key == "data") {
    c.data = v;
  } else if (key == "eps") {
    c.eps.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!trim(item).empty()) c.eps.push_back(parse_double(key, trim(item)));
  } else if (key == "wave_elems") {
    c.wave_elems = parse_int(key, v);
  } else if (key == "beam_elems") {
    c.beam_elems = parse_int(key, v);
  } else if (key == "beam_steps") {
    c.beam_steps = parse_int(key, v);
  } else if (key == "max_iter") {
    c.max_iter = parse_int(key, v);
  } else if (key == "allow_coarse") {
    c.allow_coarse = parse_bool(key, v);
  } else if (key == "out") {
    c.out = v;
  } else if (key == "seed") {
    c.seed = static_cast<unsigned>(parse_int(key, v));
  } else if (key == "jobs") {
    c.jobs = parse_int(key, v);
  } else if (key == "deep") {
    c.deep = parse_bool(key, v);
  } else if (key == "timing") {
    c.timing = parse_bool(key, v);
  } else {
    throw std::invalid_argument("unknown setting: " + key);
  }
}

ExperimentConfig load_config(const std::filesystem::path& file, ExperimentConfig base) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config " + file.string());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(file.string() + ":" + std::to_string(n) + ": expected key = value");
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

void validate(const ExperimentConfig& c) {
  if (!(c.T > 2.0)) throw std::invalid_argument("T must exceed 2");
  for (double e : c.eps_list())
    if (!(e > 0.0)) throw std::invalid_argument("eps values must be positive");
  if (c.data != "sin4" && c.data != "zero") throw std::invalid_argument("data must be sin4 or zero");
  if (c.wave_elems < 20) throw std::invalid_argument("wave_elems must be at least 20");
  if (c.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  if (c.max_iter < 1) throw std::invalid_argument("max_iter must be positive");
  if (!(c.weight_a > 0.0) || !(c.weight_p > 0.0)) throw std::invalid_argument("weight parameters must be positive");
}

Profile initial_position(const ExperimentConfig& c) {
  if (c.data == "zero") return [](double) { return 0.0; };
  return [](double x) { return std::pow(std::sin(2 * M_PI * x), 4); };
}

CascadeInput cascade_input(const ExperimentConfig& c) {
  CascadeInput in = default_cascade_input(c.wave_elems);
  in.weight = c.weight();
  in.position = initial_position(c);
  return in;
}

BeamHumProblem beam_problem(const ExperimentConfig& c, double eps) {
  BeamHumProblem p = default_beam_problem(eps);
  p.weight = c.weight();
  if (c.beam_elems) p.grid = SpaceGrid{*c.beam_elems};
  p.tgrid = c.beam_steps ? TimeGrid{c.T, *c.beam_steps} : default_beam_tgrid(p.grid, c.T);
  if (c.data == "zero") {
    p.y0.assign(2 * p.grid.nodes(), 0.0);
  } else {
    const double k = 2 * M_PI;
    p.y0 = hermite_interpolant(
        p.grid, [&](double x) { return std::pow(std::sin(k * x), 4); },
        [&](double x) { return 4 * k * std::pow(std::sin(k * x), 3) * std::cos(k * x); });
    p.y0[value_dof(0)] = p.y0[slope_dof(0)] = 0.0;
    p.y0[value_dof(p.grid.n_elem)] = p.y0[slope_dof(p.grid.n_elem)] = 0.0;
  }
  p.y1.assign(p.y0.size(), 0.0);
  p.max_iter = c.max_iter;
  p.check_resolution = !c.allow_coarse;
  return p;
}

std::vector<ExperimentRow> run_beam_sweep(const ExperimentConfig& c, const CascadeResult& cascade,
                                          std::span<const double> eps) {
  std::vector<ExperimentRow> rows(eps.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t k; (k = next++) < eps.size();) {
      ExperimentRow& r = rows[k];
      r.eps = eps[k];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        auto p = beam_problem(c, r.eps);
        HumResult h = solve_beam_control(p);
        r.iterations = h.iterations;
        r.converged = h.converged;
        r.control = std::sqrt(r.eps) * h.control;
        r.norm = l2_norm(r.control);
        const int depth = cascade.order();
        r.E0 = depth >= 0 ? expansion_error(r.control, cascade, r.eps, 0) : kNaN;
        r.E1 = depth >= 1 ? expansion_error(r.control, cascade, r.eps, 1) : kNaN;
        r.E2 = depth >= 2 ? expansion_error(r.control, cascade, r.eps, 2) : kNaN;
      } catch (const std::exception& e) {
        r.error = e.what();
        r.norm = r.E0 = r.E1 = r.E2 = kNaN;
      }
      r.seconds = c.timing ? seconds_since(t0) : 0.0;
    }
  };
  const int n = std::clamp<int>(c.jobs, 1, std::max<int>(1, static_cast<int>(eps.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

RateFit fit_rates(const std::vector<ExperimentRow>& rows) {
  std::vector<const ExperimentRow*> ok;
  for (const auto& r : rows)
    if (r.error.empty()) ok.push_back(&r);
  std::sort(ok.begin(), ok.end(), [](auto* a, auto* b) { return a->eps < b->eps; });
  if (ok.size() > 3) ok.resize(3);
  RateFit f;
  if (ok.size() < 3) throw std::runtime_error("rate fit needs three successful rows");
  std::vector<std::pair<double, double>> p0, p1, p2;
  for (auto* r : ok) {
    f.eps.push_back(r->eps);
    p0.push_back({r->eps, r->E0});
    p1.push_back({r->eps, r->E1});
    p2.push_back({r->eps, r->E2});
  }
  f.E0 = fit_rate(p0);
  f.E1 = fit_rate(p1);
  f.E2 = fit_rate(p2);
  return f;
}

void write_table1(const std::filesystem::path& file, const std::vector<ExperimentRow>& rows) {
  std::ofstream o(file, std::ios::binary);
  if (!o) throw std::runtime_error("cannot write " + file.string());
  o << "eps,iterations,norm_sqrt_eps_v,E0,E1,E2,seconds\n";
  for (const auto& r : rows)
    o << fmt(r.eps, 6) << ',' << r.iterations << ',' << fmt(r.norm, 10) << ',' << fmt(r.E0, 10) << ','
      << fmt(r.E1, 10) << ',' << fmt(r.E2, 10) << ',' << fmt(r.seconds, 4) << '\n';
}

void write_rates(const std::filesystem::path& file, const RateFit& r) {
  std::ofstream o(file, std::ios::binary);
  if (!o) throw std::runtime_error("cannot write " + file.string());
  std::string pts;
  for (double e : r.eps) pts += (pts.empty() ? "" : ";") + fmt(e, 6);
  o << "error,slope,eps\n";
  o << "E0," << fmt(r.E0, 6) << ',' << pts << '\n';
  o << "E1," << fmt(r.E1, 6) << ',' << pts << '\n';
  o << "E2," << fmt(r.E2, 6) << ',' << pts << '\n';
}

void write_signal_csv(const std::filesystem::path& file, const Signal& s) {
  std::ofstream o(file, std::ios::binary);
  if (!o) throw std::runtime_error("cannot write " + file.string());
  o << "t,value\n";
  for (int i = 0; i < s.size(); ++i) o << fmt(s.grid.t(i), 17) << ',' << fmt(s[i], 17) << '\n';
}

Signal read_signal_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "t,value") throw std::runtime_error("bad signal header in " + file.string());
  std::vector<double> t, v;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("bad signal line in " + file.string());
    t.push_back(parse_double("t", trim(line.substr(0, comma))));
    v.push_back(parse_double("value", trim(line.substr(comma + 1))));
  }
  if (v.size() < 2) throw std::runtime_error("signal needs at least two samples");
  TimeGrid g{t.back(), static_cast<int>(v.size()) - 1};
  for (size_t i = 0; i < t.size(); ++i)
    if (std::abs(t[i] - g.t(static_cast<int>(i))) > 1e-9 * g.T) throw std::runtime_error("signal times are not uniform");
  return Signal(g, std::move(v));
}

// ---------------------------------------------------------------------------------------
// Property suites.

namespace {

SuiteResult make(std::string name, double value, double threshold, std::string detail = {}) {
  SuiteResult r{std::move(name), value, threshold, value <= threshold, std::move(detail)};
  return r;
}

SuiteResult failed(std::string name, double threshold, const std::exception& e) {
  return {std::move(name), kNaN, threshold, false, e.what()};
}

// Hermite interpolant of sum_k a_k x^2 (1 - x)^2 sin(k pi x); clamped at both ends.
std::vector<double> smooth_clamped(const SpaceGrid& g, const std::vector<double>& a) {
  auto f = [&](double x) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += a[k] * std::sin((k + 1) * M_PI * x);
    return x * x * (1 - x) * (1 - x) * s;
  };
  auto df = [&](double x) {
    double s = 0.0, ds = 0.0;
    for (size_t k = 0; k < a.size(); ++k) {
      s += a[k] * std::sin((k + 1) * M_PI * x);
      ds += a[k] * (k + 1) * M_PI * std::cos((k + 1) * M_PI * x);
    }
    const double w = x * x * (1 - x) * (1 - x), dw = 2 * x * (1 - x) * (1 - 2 * x);
    return dw * s + w * ds;
  };
  auto y = hermite_interpolant(g, f, df);
  y[value_dof(0)] = y[slope_dof(0)] = y[value_dof(g.n_elem)] = y[slope_dof(g.n_elem)] = 0.0;
  return y;
}

std::vector<double> random_vector(std::mt19937& rng, size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

SuiteResult suite_wave_exactness(unsigned seed, double courant) {
  const char* name = "wave d'Alembert exactness";
  try {
    std::mt19937 rng(seed);
    const SpaceGrid g{64};
    WaveProblem p;
    p.grid = g;
    p.tgrid = time_grid_for_step(2.5, courant * g.h());
    p.position = random_vector(rng, g.nodes());
    p.position.front() = p.position.back() = 0.0;
    p.velocity.assign(g.nodes(), 0.0);
    WaveField u = solve_wave(p);
    // Odd, 2-periodic extension of the piecewise-linear initial position.
    const int J = g.n_elem;
    auto F = [&](double s) {
      double m = std::fmod(s, 2.0 * J);
      if (m < 0) m += 2.0 * J;
      double sign = 1.0;
      if (m > J) {
        m = 2.0 * J - m;
        sign = -1.0;
      }
      int i = std::min(static_cast<int>(std::floor(m)), J - 1);
      double r = m - i;
      return sign * ((1 - r) * p.position[i] + r * p.position[i + 1]);
    };
    double err = 0.0;
    for (int i = 0; i < u.tgrid.size(); ++i) {
      const double s = u.tgrid.t(i) / g.h();
      for (int j = 0; j <= J; ++j) err = std::max(err, std::abs(u(i, j) - 0.5 * (F(j - s) + F(j + s))));
    }
    return make(name, err / max_abs(p.position), 1e-12);
  } catch (const std::exception& e) {
    return failed(name, 1e-12, e);
  }
}

SuiteResult suite_beam_energy(unsigned seed) {
  const char* name = "beam Newmark energy drift";
  try {
    std::mt19937 rng(seed);
    BeamProblem p;
    p.eps = 1e-2;
    p.grid = SpaceGrid{40};
    p.tgrid = TimeGrid{2.5, 1000};
    p.y0 = smooth_clamped(p.grid, random_vector(rng, 4));
    p.y1 = smooth_clamped(p.grid, random_vector(rng, 4));
    auto f = solve_beam(p);
    auto E = beam_energy(f, assemble_beam_matrices(p.grid), p.eps);
    double drift = 0.0;
    for (int i = 0; i < E.size(); ++i) drift = std::max(drift, std::abs(E[i] - E[0]));
    return make(name, drift / E[0], 1e-8);
  } catch (const std::exception& e) {
    return failed(name, 1e-8, e);
  }
}

SuiteResult suite_wave_gradient(unsigned seed) {
  const char* name = "wave HUM gradient check";
  try {
    std::mt19937 rng(seed);
    auto p = default_wave_problem(50);
    const size_t n = 2 * (p.grid.n_elem - 1);
    auto base = random_vector(rng, n), dir = random_vector(rng, n);
    return make(name, gradient_check_wave(p, base, dir, 1e-5), 1e-6);
  } catch (const std::exception& e) {
    return failed(name, 1e-6, e);
  }
}

namespace {

BeamHumProblem small_beam_problem() {
  BeamHumProblem p;
  p.eps = 0.1;
  p.grid = SpaceGrid{20};
  p.tgrid = TimeGrid{2.5, 250};
  p.max_iter = 3000;
  return p;
}

}  // namespace

SuiteResult suite_beam_gradient(unsigned seed) {
  const char* name = "beam HUM gradient check";
  try {
    std::mt19937 rng(seed);
    auto p = small_beam_problem();
    p.y0 = smooth_clamped(p.grid, {1.0, 0.5});
    p.y1.assign(p.y0.size(), 0.0);
    const size_t n = static_cast<size_t>(beam_hum_dim(p));
    auto base = random_vector(rng, n), dir = random_vector(rng, n);
    return make(name, gradient_check_beam(p, base, dir, 1e-5), 1e-6);
  } catch (const std::exception& e) {
    return failed(name, 1e-6, e);
  }
}

SuiteResult suite_wave_certificate() {
  const char* name = "wave null-control certificate";
  try {
    auto p = default_wave_problem(200);
    p.tol = 1e-11;  // stop on the state estimate; the certificate is an independent solve
    p.state_tol = 1e-7;
    auto r = solve_wave_control(p);
    if (!r.converged) return {name, r.final_residual, 1e-6, false, "no converged run"};
    return make(name, wave_control_certificate(p, r.control), 1e-6,
                std::to_string(r.iterations) + " iterations");
  } catch (const std::exception& e) {
    return failed(name, 1e-6, e);
  }
}

SuiteResult suite_beam_certificate() {
  const char* name = "beam null-control certificate";
  try {
    // Low clamped modes: the coarse discrete problem is well observed on them.
    auto p = small_beam_problem();
    BeamModes m(assemble_beam_matrices(p.grid), p.eps);
    std::vector<double> a0(m.size(), 0.0), a1(m.size(), 0.0);
    a0[0] = 1.0;
    a0[1] = 0.5;
    a0[2] = 1.0 / 3.0;
    p.y0 = m.state(0.0, a0, a1);
    p.y1.assign(p.y0.size(), 0.0);
    auto r = solve_beam_control(p);
    if (!r.converged) return {name, r.final_residual, 1e-6, false, "no converged run"};
    return make(name, beam_control_certificate(p, r.control), 1e-6,
                std::to_string(r.iterations) + " iterations");
  } catch (const std::exception& e) {
    return failed(name, 1e-6, e);
  }
}

SuiteResult suite_wave_reversibility(unsigned seed) {
  const char* name = "wave time reversibility";
  try {
    std::mt19937 rng(seed);
    const SpaceGrid g{80};
    WaveProblem p;
    p.grid = g;
    p.tgrid = wave_time_grid(g, 2.5);
    p.position = random_vector(rng, g.nodes());
    p.velocity = random_vector(rng, g.nodes());
    p.position.front() = p.position.back() = 0.0;
    WaveField u = solve_wave(p);
    const int N = p.tgrid.n_steps, J = g.n_elem;
    // Final data whose backward start reproduces level N - 1 exactly.
    WaveProblem b = p;
    b.position.assign(u.level(N).begin(), u.level(N).end());
    b.velocity.assign(g.nodes(), 0.0);
    for (int j = 1; j < J; ++j)
      b.velocity[j] = (0.5 * (u(N, j - 1) + u(N, j + 1)) - u(N - 1, j)) / p.tgrid.dt();
    WaveField w = solve_wave(b, Direction::backward);
    double err = 0.0;
    for (int i : {0, 1})
      for (int j = 0; j <= J; ++j) err = std::max(err, std::abs(w(i, j) - u(i, j)));
    return make(name, err / max_abs(u.u), 1e-8);
  } catch (const std::exception& e) {
    return failed(name, 1e-8, e);
  }
}

SuiteResult suite_beam_reversibility(unsigned seed) {
  const char* name = "beam time reversibility";
  try {
    std::mt19937 rng(seed);
    BeamProblem p;
    p.eps = 1e-2;
    p.grid = SpaceGrid{40};
    p.tgrid = TimeGrid{2.5, 500};
    p.y0 = smooth_clamped(p.grid, random_vector(rng, 3));
    p.y1 = smooth_clamped(p.grid, random_vector(rng, 3));
    p.control = Signal(p.tgrid);
    for (int i = 0; i < p.control.size(); ++i) p.control[i] = 0.1 * std::pow(std::sin(M_PI * p.tgrid.t(i) / 2.5), 2);
    auto f = solve_beam(p);
    const int N = p.tgrid.n_steps;
    BeamProblem b = p;
    b.y0.assign(f.level(N).begin(), f.level(N).end());
    b.y1.assign(f.velocity(N).begin(), f.velocity(N).end());
    auto g = solve_beam(b, Direction::backward);
    double err = 0.0;
    for (size_t k = 0; k < p.y0.size(); ++k)
      err = std::max({err, std::abs(g.level(0)[k] - p.y0[k]), std::abs(g.velocity(0)[k] - p.y1[k])});
    return make(name, err / std::max(max_abs(p.y0), max_abs(p.y1)), 1e-8);
  } catch (const std::exception& e) {
    return failed(name, 1e-8, e);
  }
}

SuiteResult suite_cascade_linearity(unsigned seed) {
  const char* name = "cascade linearity";
  try {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    const double a = u(rng), b = -u(rng);
    auto base = default_cascade_input(200);
    CascadeInput i1 = base, i2 = base, i3 = base;
    auto f1 = [](double x) { return std::pow(std::sin(2 * M_PI * x), 4); };
    auto f2 = [](double x) { return std::pow(std::sin(3 * M_PI * x), 4); };
    auto g2 = [](double x) { return 0.5 * std::pow(std::sin(M_PI * x), 4); };
    i1.position = f1;
    i2.position = f2;
    i2.velocity = g2;
    i3.position = [=](double x) { return a * f1(x) + b * f2(x); };
    i3.velocity = [=](double x) { return b * g2(x); };
    auto c1 = run_cascade(i1), c2 = run_cascade(i2), c3 = run_cascade(i3);
    double worst = 0.0;
    for (int j = 0; j <= 2; ++j) {
      Signal d = c3.levels[j].v - (a * c1.levels[j].v + b * c2.levels[j].v);
      double scale = std::abs(a) * l2_norm(c1.levels[j].v) + std::abs(b) * l2_norm(c2.levels[j].v);
      worst = std::max(worst, l2_norm(d) / scale);
    }
    return make(name, worst, 1e-9);
  } catch (const std::exception& e) {
    return failed(name, 1e-9, e);
  }
}

SuiteResult suite_layer_scaling() {
  const char* name = "layer source energy exponent";
  try {
    TimeGrid tg{2.5, 1000};
    Signal f(tg);
    for (int i = 0; i < tg.size(); ++i) f[i] = std::pow(std::sin(M_PI * tg.t(i) / 2.5), 2);
    const double eps[] = {1e-3, 1e-4, 1e-5};
    auto r = layer_source_scaling(eps, f);
    // Reported as a shortfall below the required exponent.
    SuiteResult s{name, r.exponent, 0.65, r.exponent >= 0.65, "exponent " + fmt(r.exponent, 4)};
    return s;
  } catch (const std::exception& e) {
    return failed(name, 0.65, e);
  }
}

SuiteResult suite_adjoint_expansion() {
  const char* name = "adjoint expansion slopes";
  try {
    auto c = run_cascade(default_cascade_input(400));
    const double eps[] = {1e-3, 1e-4, 1e-5};
    double margin = std::numeric_limits<double>::infinity();
    std::string detail;
    for (int n = 0; n <= 2; ++n) {
      std::vector<std::pair<double, double>> pts;
      for (double e : eps) pts.push_back({e, adjoint_expansion_check(c, e, n).residual});
      const double s = fit_rate(pts);
      margin = std::min(margin, s - (0.5 * n + 0.15));
      detail += (detail.empty() ? "" : ", ") + ("n=" + std::to_string(n) + " slope " + fmt(s, 4));
    }
    return {name, margin, 0.0, margin >= 0.0, detail};
  } catch (const std::exception& e) {
    return failed(name, 0.0, e);
  }
}

std::vector<SuiteResult> run_verify(const VerifyOptions& o) {
  std::vector<SuiteResult> r;
  r.push_back(suite_wave_exactness(o.seed, o.courant));
  r.push_back(suite_beam_energy(o.seed));
  r.push_back(suite_wave_gradient(o.seed));
  r.push_back(suite_beam_gradient(o.seed));
  r.push_back(suite_wave_certificate());
  r.push_back(suite_beam_certificate());
  r.push_back(suite_wave_reversibility(o.seed));
  r.push_back(suite_beam_reversibility(o.seed));
  r.push_back(suite_cascade_linearity(o.seed));
  if (!o.quick) {
    r.push_back(suite_layer_scaling());
    r.push_back(suite_adjoint_expansion());
  }
  return r;
}

}  // namespace singctrl
