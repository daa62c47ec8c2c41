// Acceptance report: one PASS/FAIL line per criterion. Exits 0 once every criterion has been
// evaluated (failures included) unless --strict is given; crashes and exceptions exit 1.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "singctrl/experiment.hpp"

using namespace singctrl;

namespace {

double now() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

struct Report {
  std::ofstream file;
  int failures = 0;

  void line(int id, bool pass, const std::string& text) {
    if (!pass) ++failures;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s criterion %d: ", pass ? "PASS" : "FAIL", id);
    std::printf("%s%s\n", buf, text.c_str());
    std::fflush(stdout);
    if (file) file << buf << text << '\n' << std::flush;
  }
};

std::string f(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false, skip_sweep = false;
  std::string report_path;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--strict")) strict = true;
    else if (!std::strcmp(argv[i], "--skip-sweep")) skip_sweep = true;
    else if (!std::strcmp(argv[i], "--report") && i + 1 < argc) report_path = argv[++i];
  }
  Report rep;
  if (!report_path.empty()) rep.file.open(report_path);

  try {
    ExperimentConfig cfg;  // T = 2.5, sin^4 data, eta with a = 40, p = 3

    // 1. Wave control norm on h = 1/400.
    double t0 = now();
    CascadeResult cascade = run_cascade(cascade_input(cfg));
    const double t_cascade = now() - t0;
    {
      const double v0 = l2_norm(cascade.levels[0].v);
      const double rel = (v0 - 0.3498) / 0.3498;
      rep.line(1, std::abs(rel) <= 0.02 && t_cascade <= 30,
               f("||v0|| = %.6f (target 0.3498 +- 2%%, off %+.2f%%), J = %d, %.1f s for all three levels", v0,
                 100 * rel, cfg.wave_elems, t_cascade));
    }

    // 2 and 3. Beam controls.
    if (skip_sweep) {
      rep.line(2, false, "skipped (--skip-sweep)");
      rep.line(3, false, "skipped (--skip-sweep)");
    } else {
      cfg.jobs = 3;
      const double eps2[] = {1e-2};
      auto r2 = run_beam_sweep(cfg, cascade, eps2);
      const double eps3[] = {1e-3, 1e-4, 1e-5};
      t0 = now();
      auto r3 = run_beam_sweep(cfg, cascade, eps3);
      const double t_sweep = now() - t0;

      auto norm_ok = [](const ExperimentRow& r, double target) {
        return r.error.empty() && std::abs(r.norm - target) <= 0.05 * target && r.seconds <= 300;
      };
      const auto &a = r2[0], &b = r3[0];
      rep.line(2, norm_ok(a, 0.2965) && norm_ok(b, 0.3542),
               f("||sqrt(eps) v|| = %.4f at 1e-2 (target 0.2965, off %+.1f%%, %.0f s, %d it), %.4f at 1e-3 "
                 "(target 0.3542, off %+.1f%%, %.0f s, %d it)%s%s",
                 a.norm, 100 * (a.norm / 0.2965 - 1), a.seconds, a.iterations, b.norm, 100 * (b.norm / 0.3542 - 1),
                 b.seconds, b.iterations, a.error.empty() ? "" : " error: ", a.error.c_str()));

      bool ok = t_sweep <= 1800;
      std::string text;
      try {
        RateFit fit = fit_rates(r3);
        ok = ok && fit.E0 >= 0.40 && fit.E0 <= 0.80 && fit.E1 >= 0.80 && fit.E1 <= 1.25 && fit.E2 >= 1.10 &&
             fit.E2 <= 1.60;
        text = f("slopes E0 %.3f [0.40, 0.80], E1 %.3f [0.80, 1.25], E2 %.3f [1.10, 1.60]; sweep %.0f s", fit.E0, fit.E1,
                 fit.E2, t_sweep);
      } catch (const std::exception& e) {
        ok = false;
        text = e.what();
      }
      for (const auto& r : r3)
        text += f("; eps %g: E0 %.3g E1 %.3g E2 %.3g (%d it%s)", r.eps, r.E0, r.E1, r.E2, r.iterations,
                  r.error.empty() ? "" : ", failed");
      rep.line(3, ok, text);
    }

    // 4. Adjoint construction.
    {
      auto s = suite_adjoint_expansion();
      rep.line(4, s.pass, s.detail + " (thresholds 0.15, 0.65, 1.15)");
    }

    // 5. Boundary-layer energy.
    {
      auto s = suite_layer_scaling();
      rep.line(5, s.pass, s.detail + " (threshold 0.65)");
    }

    // 6. Composite approximations with the manufactured controls.
    {
      auto in = cascade_input(cfg);
      const double eps[] = {1e-3, 1e-4, 1e-5};
      std::vector<std::pair<double, double>> e0, e1;
      for (double e : eps) {
        e0.push_back({e, composite_error(cascade, in, e, 0)});
        e1.push_back({e, composite_error(cascade, in, e, 1)});
      }
      const double s0 = fit_rate(e0), s1 = fit_rate(e1);
      rep.line(6, s0 >= 0.45 && s1 >= 0.65,
               f("slopes %.3f (n = 0, threshold 0.45) and %.3f (n = 1, threshold 0.65); errors at 1e-5: %.3g, %.3g", s0,
                 s1, e0.back().second, e1.back().second));
    }

    // 7. Property suites without any beam sweep.
    {
      VerifyOptions o;
      o.quick = true;
      t0 = now();
      auto rs = run_verify(o);
      const double t = now() - t0;
      bool ok = t <= 120;
      std::string text;
      for (const auto& r : rs) {
        ok = ok && r.pass;
        text += f("%s%s %.2e%s", text.empty() ? "" : "; ", r.name.c_str(), r.value, r.pass ? "" : " FAILED");
      }
      rep.line(7, ok, text + f("; %.1f s", t));
    }
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criterion failure(s)\n", rep.failures);
  return strict && rep.failures ? 1 : 0;
}
