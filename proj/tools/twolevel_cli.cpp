// twolevel: convergence tables for the two-grid and two-level correction schemes.
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twolevel/twolevel.hpp"

namespace {

using namespace twolevel;

std::ostream* open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return &std::cout;
  file.open(path);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  return &file;
}

int parse_fine_factor(const std::string& s) {
  if (s == "square") return 0;
  try {
    std::size_t used = 0;
    const int r = std::stoi(s, &used);
    if (used == s.size() && r >= 1) return r;
  } catch (const std::exception&) {
  }
  throw ConfigError("--fine-factor must be 'square' or a positive integer, got '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-grid / two-level finite element experiments on the unit square"};
  app.require_subcommand(0, 1);

  RunConfig cfg;
  std::string example = "1";
  std::string fine_factor = "square";
  std::string solver = "direct";
  std::string output;
  int scale = -1;
  double stop_tol = -1.0;

  const std::map<std::string, Algorithm> algorithms{
      {"galerkin", Algorithm::galerkin}, {"two-grid", Algorithm::two_grid}, {"two-level", Algorithm::two_level}};
  const std::map<std::string, OutputFormat> formats{{"csv", OutputFormat::csv}, {"markdown", OutputFormat::markdown}};
  const std::map<std::string, Diagonal> diagonals{{"anti", Diagonal::anti}, {"main", Diagonal::main}};
  const std::map<std::string, ErrorReference> references{{"exact", ErrorReference::exact},
                                                         {"interpolant", ErrorReference::interpolant}};

  app.add_option("--example", example, "1, 2, or a path to a JSON problem file")->capture_default_str();
  app.add_option("--algorithm", cfg.algorithm, "galerkin | two-grid | two-level")
      ->transform(CLI::CheckedTransformer(algorithms, CLI::ignore_case))
      ->default_str("two-level");
  app.add_option("--l", cfg.l, "coarse polynomial degree")->capture_default_str();
  app.add_option("--s", cfg.s, "fine polynomial degree (two-level)")->capture_default_str();
  app.add_option("--k", cfg.k, "number of correction rounds")->capture_default_str();
  app.add_option("--M", cfg.M_list, "coarse subdivisions, comma separated")->delimiter(',')->default_str("9,10,11,12");
  app.add_option("--fine-factor", fine_factor, "two-grid nesting factor r: 'square' (r = M) or an integer")
      ->capture_default_str();
  app.add_option("--scale-exponent", scale, "p in the scaled column error * H^-p");
  app.add_option("--solver", solver, "direct | iterative")
      ->check(CLI::IsMember({"direct", "iterative"}))
      ->capture_default_str();
  app.add_option("--stop-tol", stop_tol, "stop early once the fine residual drops below this");
  app.add_option("--format", cfg.format, "csv | markdown")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
      ->default_str("csv");
  app.add_option("--output,-o", output, "output file (default stdout)");
  app.add_flag("--parallel", cfg.parallel, "compute rows concurrently, without timings");
  app.add_option("--threads", cfg.threads, "worker threads for --parallel (default TWOLEVEL_THREADS)");
  app.add_option("--diagonal", cfg.diagonal, "cell diagonal: main (slope +1) | anti (slope -1)")
      ->transform(CLI::CheckedTransformer(diagonals, CLI::ignore_case))
      ->default_str("main");
  app.add_option("--error-reference", cfg.error_reference,
                 "compare against the interpolant of u in the output space, or u itself")
      ->transform(CLI::CheckedTransformer(references, CLI::ignore_case))
      ->default_str("interpolant");

  auto* dofs = app.add_subcommand("dof-table", "DOF counts of V_H^l and of V_h^3 with h = H^2");
  std::vector<int> dof_M{9, 10, 11, 12};
  std::vector<int> dof_degrees{3, 4, 5, 6};
  int dof_fine = 3;
  std::string dof_format = "markdown";
  dofs->add_option("--M", dof_M, "coarse subdivisions")->delimiter(',');
  dofs->add_option("--degrees", dof_degrees, "coarse degrees")->delimiter(',');
  dofs->add_option("--fine-degree", dof_fine, "degree of the h = H^2 column")->capture_default_str();
  dofs->add_option("--format", dof_format, "csv | markdown")
      ->check(CLI::IsMember({"csv", "markdown"}))
      ->capture_default_str();

  auto* mesh_cmd = app.add_subcommand("mesh", "dump the structured mesh");
  int mesh_M = 2;
  Diagonal mesh_diagonal = Diagonal::main;
  mesh_cmd->add_option("--M", mesh_M, "subdivisions")->capture_default_str();
  mesh_cmd->add_option("--diagonal", mesh_diagonal, "main | anti")
      ->transform(CLI::CheckedTransformer(diagonals, CLI::ignore_case))
      ->default_str("main");

  CLI11_PARSE(app, argc, argv);

  try {
    std::ofstream file;
    std::ostream& os = *open_output(output, file);

    if (*dofs) {
      for (int l : dof_degrees) {
        if (l < 1 || l > kMaxDegree) throw ConfigError("degrees must lie in [1, 6]");
      }
      const DofTable t = dof_table(dof_M, dof_degrees, dof_fine);
      write_dof_table(os, t, dof_format == "csv" ? OutputFormat::csv : OutputFormat::markdown);
      return 0;
    }
    if (*mesh_cmd) {
      write_mesh(os, build_structured_mesh(mesh_M, mesh_diagonal));
      return 0;
    }

    if (example == "1" || example == "2") {
      cfg.example = std::stoi(example);
    } else if (example.find('.') != std::string::npos || example.find('/') != std::string::npos) {
      cfg.problem_file = example;
    } else {
      throw ConfigError("--example must be 1, 2 or a problem file path, got '" + example + "'");
    }
    cfg.fine_factor = parse_fine_factor(fine_factor);
    if (app.count("--scale-exponent")) cfg.scale_exponent = scale;
    if (app.count("--stop-tol")) cfg.stop_tolerance = stop_tol;
    cfg.iterative = solver == "iterative";

    const auto rows = run_experiment(cfg);
    if (cfg.format == OutputFormat::csv) {
      write_csv(os, rows);
    } else {
      write_markdown(os, rows, scale_exponent(cfg));
    }
    int failed = 0;
    for (const auto& r : rows) {
      if (r.failed) {
        std::cerr << "M=" << r.M << " failed: " << r.failure << '\n';
        ++failed;
      }
    }
    return failed == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
