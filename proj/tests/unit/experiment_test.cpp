#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "twolevel/twolevel.hpp"

using namespace twolevel;

TEST(Experiment, DofTableMatchesCounts) {
  const DofTable t = dof_table({9, 10, 11, 12}, {3, 4, 5, 6});
  EXPECT_EQ(t.coarse[0], (std::vector<long long>{784, 1369, 2116, 3025}));
  EXPECT_EQ(t.coarse[3], (std::vector<long long>{1369, 2401, 3721, 5329}));
  EXPECT_EQ(t.fine, (std::vector<long long>{59536, 90601, 132496, 187489}));
  EXPECT_EQ(dof_table({1}, {1}).coarse[0][0], 4);
  std::ostringstream os;
  write_dof_table(os, dof_table({9}, {3, 4}), OutputFormat::csv);
  EXPECT_EQ(os.str(), "M,dof(V_H^3),dof(V_h^3),dof(V_H^4)\n9,784,59536,1369\n");
}

TEST(Experiment, CsvLayout) {
  ExperimentRow ok;
  ok.M = 9;
  ok.H = 1.0 / 9;
  ok.l = 3;
  ok.s_or_r = 6;
  ok.k = 3;
  ok.dofs_coarse = 784;
  ok.dofs_fine = 3025;
  ok.h1_error = 5.775e-8;
  ok.scaled_error = 3.0691e-2;
  ok.cpu_seconds = 0.25;
  ExperimentRow bad = ok;
  bad.failed = true;
  ExperimentRow untimed = ok;
  untimed.timed = false;
  std::ostringstream os;
  write_csv(os, {ok, bad, untimed});
  EXPECT_EQ(os.str(),
            "M,H,l,s_or_r,k,dofs_coarse,dofs_fine,h1_error,scaled_error,cpu_seconds\n"
            "9,1.111111e-01,3,6,3,784,3025,5.775000e-08,3.069100e-02,2.500000e-01\n"
            "9,1.111111e-01,3,6,3,784,3025,failed,failed,\n"
            "9,1.111111e-01,3,6,3,784,3025,5.775000e-08,3.069100e-02,\n");
}

TEST(Experiment, DefaultScaleExponent) {
  RunConfig c;
  c.algorithm = Algorithm::two_level;
  EXPECT_EQ(default_scale_exponent(c), 6);
  c.s = 4;
  EXPECT_EQ(default_scale_exponent(c), 4);
  c.algorithm = Algorithm::two_grid;
  EXPECT_EQ(default_scale_exponent(c), 6);
  c.fine_factor = 2;
  EXPECT_EQ(default_scale_exponent(c), 3);
  c.algorithm = Algorithm::galerkin;
  EXPECT_EQ(default_scale_exponent(c), 3);
  c.scale_exponent = 1;
  EXPECT_EQ(scale_exponent(c), 1);
}

TEST(Experiment, Validation) {
  RunConfig c;
  c.example = 3;
  EXPECT_THROW(validate(c), ConfigError);
  c = RunConfig{};
  c.M_list.clear();
  EXPECT_THROW(validate(c), ConfigError);
  c = RunConfig{};
  c.s = 3;
  EXPECT_THROW(validate(c), ConfigError);
  c = RunConfig{};
  c.algorithm = Algorithm::two_grid;
  c.M_list = {1};
  EXPECT_THROW(validate(c), ConfigError);
  c.M_list = {100};
  EXPECT_THROW(validate(c), ConfigError);
  c = RunConfig{};
  c.problem_file = "/nonexistent/problem.json";
  EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(Experiment, GalerkinSmoke) {
  RunConfig c;
  c.algorithm = Algorithm::galerkin;
  c.l = 1;
  c.M_list = {2};
  c.error_reference = ErrorReference::exact;
  const auto rows = run_experiment(c);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].failed);
  EXPECT_GT(rows[0].h1_error, 0.0);
  EXPECT_EQ(rows[0].dofs_coarse, 9);
  EXPECT_EQ(rows[0].k, 0);
}

TEST(Experiment, DeterministicAndParallel) {
  RunConfig c;
  c.l = 2;
  c.s = 3;
  c.M_list = {3, 4, 5};
  const auto a = run_experiment(c);
  const auto b = run_experiment(c);
  c.parallel = true;
  c.threads = 2;
  const auto p = run_experiment(c);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].h1_error, b[i].h1_error);
    EXPECT_EQ(a[i].h1_error, p[i].h1_error);
    EXPECT_TRUE(a[i].timed);
    EXPECT_FALSE(p[i].timed);
  }
}

TEST(Experiment, ProblemFile) {
  const std::string path = testing::TempDir() + "twolevel_problem.json";
  {
    std::ofstream f(path);
    f << R"({"alpha": [[2.0, 0.5], [0.5, 1.0]], "beta": [1.0, -1.0], "gamma": -2.0, "exact": "polynomial"})";
  }
  RunConfig c;
  c.problem_file = path;
  c.algorithm = Algorithm::two_level;
  c.l = 2;
  c.s = 6;
  c.k = 10;
  c.M_list = {3};
  const auto rows = run_experiment(c);
  ASSERT_FALSE(rows[0].failed) << rows[0].failure;
  EXPECT_LT(rows[0].h1_error, 1e-9);

  {
    std::ofstream f(path);
    f << R"({"alpha": -1.0})";
  }
  EXPECT_THROW(run_experiment(c), ConfigError);
  {
    std::ofstream f(path);
    f << R"({"exact": "cosine"})";
  }
  EXPECT_THROW(run_experiment(c), ConfigError);
  std::remove(path.c_str());
}

TEST(Experiment, MarkdownRow) {
  RunConfig c;
  c.algorithm = Algorithm::galerkin;
  c.l = 2;
  c.M_list = {4};
  std::ostringstream os;
  write_markdown(os, run_experiment(c), 2);
  EXPECT_NE(os.str().find("| 1/4 | 2 | 2 | 0 | 81 | 81 |"), std::string::npos) << os.str();
}
