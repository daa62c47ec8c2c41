#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "singctrl/beam_hum.hpp"
#include "singctrl/cascade.hpp"

namespace singctrl {

struct ExperimentConfig {
  double T = 2.5;
  double weight_a = 40.0;
  double weight_p = 3.0;
  std::string data = "sin4";  // sin4 or zero
  std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4, 5e-5, 1e-5};
  int wave_elems = 400;
  std::optional<int> beam_elems;
  std::optional<int> beam_steps;
  int max_iter = 1000;
  bool allow_coarse = false;  // skip the beam resolution rule
  std::filesystem::path out = ".";
  unsigned seed = 20240611;
  int jobs = 1;
  bool deep = false;  // appends the two finest rows
  bool timing = true;  // false writes zero seconds so repeated runs give identical files

  WeightFn weight() const { return {T, weight_a, weight_p}; }
  std::vector<double> eps_list() const;
};

inline const std::vector<double> kDeepEps{5e-6, 1e-6};

// Flat "key = value" lines, '#' comments. Unknown keys and malformed values throw.
void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value);
ExperimentConfig load_config(const std::filesystem::path& file, ExperimentConfig base = {});
void validate(const ExperimentConfig& c);

Profile initial_position(const ExperimentConfig& c);
CascadeInput cascade_input(const ExperimentConfig& c);
BeamHumProblem beam_problem(const ExperimentConfig& c, double eps);

struct ExperimentRow {
  double eps = 0.0;
  int iterations = 0;
  double norm = 0.0;  // || sqrt(eps) v_eps ||
  double E0 = 0.0, E1 = 0.0, E2 = 0.0;
  double seconds = 0.0;
  bool converged = false;
  std::string error;
  Signal control;  // sqrt(eps) v_eps
};

struct RateFit {
  double E0 = 0.0, E1 = 0.0, E2 = 0.0;
  std::vector<double> eps;  // points used
};

// Beam controls per eps (up to c.jobs at once), then the expansion errors against `cascade`.
// A failing eps records its message in the row; the others proceed.
std::vector<ExperimentRow> run_beam_sweep(const ExperimentConfig& c, const CascadeResult& cascade,
                                          std::span<const double> eps);
// Slopes over the three smallest eps among rows without errors.
RateFit fit_rates(const std::vector<ExperimentRow>& rows);

void write_table1(const std::filesystem::path& file, const std::vector<ExperimentRow>& rows);
void write_rates(const std::filesystem::path& file, const RateFit& r);
// Two columns t,value with round-trip precision.
void write_signal_csv(const std::filesystem::path& file, const Signal& s);
Signal read_signal_csv(const std::filesystem::path& file);

struct SuiteResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  unsigned seed = 20240611;
  double courant = 1.0;  // ratio dt / h of the exactness suite
  bool quick = false;    // drops the eps-sweep diagnostics
};

// Property suites: wave exactness, beam energy, gradient checks, null-control certificates,
// reversibility, cascade linearity, layer-source scaling and the adjoint expansion check.
std::vector<SuiteResult> run_verify(const VerifyOptions& o);

// Individual suites, shared with the tests.
SuiteResult suite_wave_exactness(unsigned seed, double courant = 1.0);
SuiteResult suite_beam_energy(unsigned seed);
SuiteResult suite_wave_gradient(unsigned seed);
SuiteResult suite_beam_gradient(unsigned seed);
SuiteResult suite_wave_certificate();
SuiteResult suite_beam_certificate();
SuiteResult suite_wave_reversibility(unsigned seed);
SuiteResult suite_beam_reversibility(unsigned seed);
SuiteResult suite_cascade_linearity(unsigned seed);
SuiteResult suite_layer_scaling();
SuiteResult suite_adjoint_expansion();

}  // namespace singctrl
