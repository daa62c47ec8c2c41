#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "singctrl/experiment.hpp"

namespace fs = std::filesystem;
using namespace singctrl;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("singctrl_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny() {
  ExperimentConfig c;
  c.wave_elems = 40;
  c.eps = {0.1, 0.05, 0.02};
  c.beam_elems = 20;
  c.beam_steps = 200;
  c.max_iter = 20;
  c.allow_coarse = true;
  c.timing = false;
  return c;
}

}  // namespace

TEST(Config, ParsesFlatFile) {
  auto dir = scratch("config");
  {
    std::ofstream o(dir / "c.cfg");
    o << "# sweep\nT = 3.0\neps = 1e-2, 1e-3 # two rows\n\nweight_a=20\ndata = zero\njobs = 3\ndeep = true\n";
  }
  auto c = load_config(dir / "c.cfg");
  EXPECT_EQ(c.T, 3.0);
  EXPECT_EQ(c.eps, (std::vector<double>{1e-2, 1e-3}));
  EXPECT_EQ(c.weight_a, 20.0);
  EXPECT_EQ(c.data, "zero");
  EXPECT_EQ(c.jobs, 3);
  EXPECT_EQ(c.eps_list().size(), 4u);
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  ExperimentConfig c;
  EXPECT_THROW(apply_setting(c, "colour", "red"), std::invalid_argument);
  EXPECT_THROW(apply_setting(c, "T", "2.5s"), std::invalid_argument);
  EXPECT_THROW(apply_setting(c, "jobs", "1.5"), std::invalid_argument);
  EXPECT_THROW(apply_setting(c, "deep", "maybe"), std::invalid_argument);
}

TEST(Config, ValidateInvariants) {
  ExperimentConfig c;
  c.T = 2.0;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = ExperimentConfig{};
  c.eps = {1e-3, -1e-4};
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = ExperimentConfig{};
  c.data = "cos";
  EXPECT_THROW(validate(c), std::invalid_argument);
  EXPECT_NO_THROW(validate(ExperimentConfig{}));
}

TEST(Config, DefaultSweepStopsAtDeskScale) {
  ExperimentConfig c;
  EXPECT_EQ(c.eps_list().back(), 1e-5);
  c.deep = true;
  EXPECT_EQ(c.eps_list().back(), 1e-6);
}

TEST(Csv, SignalRoundTripIsBitExact) {
  auto dir = scratch("csv");
  TimeGrid g{2.5, 333};
  Signal s(g);
  for (int i = 0; i < g.size(); ++i) s[i] = std::sin(1e3 * g.t(i)) / 3.0 + 1e-300 * i;
  write_signal_csv(dir / "s.csv", s);
  Signal r = read_signal_csv(dir / "s.csv");
  ASSERT_EQ(r.size(), s.size());
  EXPECT_EQ(r.grid, s.grid);
  for (int i = 0; i < s.size(); ++i) EXPECT_EQ(r[i], s[i]);
}

TEST(Csv, Table1Header) {
  auto dir = scratch("table");
  ExperimentRow r;
  r.eps = 1e-3;
  write_table1(dir / "t.csv", {r});
  auto text = slurp(dir / "t.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "eps,iterations,norm_sqrt_eps_v,E0,E1,E2,seconds");
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Rates, SmallestThreeEps) {
  std::vector<ExperimentRow> rows;
  for (double e : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    ExperimentRow r;
    r.eps = e;
    r.E0 = std::pow(e, 0.5);
    r.E1 = e < 5e-2 ? std::pow(e, 1.0) : 1.0;  // the largest eps must be ignored
    r.E2 = std::pow(e, 1.5);
    rows.push_back(r);
  }
  rows[4].error = "failed";
  rows[4].E1 = 1e9;
  auto f = fit_rates(rows);
  EXPECT_EQ(f.eps, (std::vector<double>{1e-4, 1e-3, 1e-2}));
  EXPECT_NEAR(f.E0, 0.5, 1e-12);
  EXPECT_NEAR(f.E1, 1.0, 1e-12);
  EXPECT_NEAR(f.E2, 1.5, 1e-12);
}

TEST(Sweep, FailuresAreRecordedPerRow) {
  auto c = tiny();
  c.allow_coarse = false;
  auto casc = run_cascade(cascade_input(c));
  const double eps[] = {0.1, 1e-4};
  auto rows = run_beam_sweep(c, casc, eps);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].error.empty());
  EXPECT_FALSE(rows[1].error.empty());
  EXPECT_TRUE(std::isnan(rows[1].E0));
}

TEST(Sweep, DeterministicAcrossJobCounts) {
  auto c = tiny();
  auto casc = run_cascade(cascade_input(c));
  auto d1 = scratch("det1"), d2 = scratch("det2");
  auto eps = c.eps_list();
  write_table1(d1 / "table1.csv", run_beam_sweep(c, casc, eps));
  c.jobs = 3;
  write_table1(d2 / "table1.csv", run_beam_sweep(c, casc, eps));
  EXPECT_EQ(slurp(d1 / "table1.csv"), slurp(d2 / "table1.csv"));
  for (int j = 0; j <= 2; ++j) {
    write_signal_csv(d1 / "v.csv", casc.levels[j].v);
    write_signal_csv(d2 / "v.csv", run_cascade(cascade_input(c)).levels[j].v);
    EXPECT_EQ(slurp(d1 / "v.csv"), slurp(d2 / "v.csv"));
  }
}

TEST(Sweep, ZeroDataZeroRows) {
  auto c = tiny();
  c.data = "zero";
  auto casc = run_cascade(cascade_input(c));
  const double eps[] = {0.1};
  auto rows = run_beam_sweep(c, casc, eps);
  EXPECT_EQ(rows[0].norm, 0.0);
  EXPECT_EQ(rows[0].E0, 0.0);
  EXPECT_EQ(rows[0].E2, 0.0);
}

TEST(Verify, QuickSuitesPass) {
  VerifyOptions o;
  o.quick = true;
  for (const auto& r : run_verify(o)) EXPECT_TRUE(r.pass) << r.name << " " << r.value << " " << r.detail;
}

TEST(Verify, BrokenCourantFailsExactness) {
  VerifyOptions o;
  o.quick = true;
  o.courant = 0.8;
  auto rs = run_verify(o);
  EXPECT_FALSE(rs.front().pass);
  EXPECT_EQ(rs.front().name, "wave d'Alembert exactness");
}
