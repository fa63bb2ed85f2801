#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "twolevel/algorithms.hpp"
#include "twolevel/analysis.hpp"
#include "twolevel/problems.hpp"

namespace twolevel {

enum class Algorithm { galerkin, two_grid, two_level };
enum class OutputFormat { csv, markdown };

inline const char* to_string(Diagonal d) { return d == Diagonal::anti ? "anti" : "main"; }
inline const char* to_string(ErrorReference r) { return r == ErrorReference::exact ? "exact" : "interpolant"; }

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::galerkin: return "galerkin";
    case Algorithm::two_grid: return "two-grid";
    case Algorithm::two_level: return "two-level";
  }
  return "?";
}

struct RunConfig {
  int example = 1;                          // 1 or 2; ignored when problem_file is set
  std::optional<std::string> problem_file;  // custom JSON problem
  Algorithm algorithm = Algorithm::two_level;
  int l = 3;
  int s = 6;
  int k = 3;
  std::vector<int> M_list{9, 10, 11, 12};
  int fine_factor = 0;  // 0 selects r = M, i.e. h = H^2
  std::optional<int> scale_exponent;
  bool iterative = false;
  std::optional<double> stop_tolerance;
  OutputFormat format = OutputFormat::csv;
  bool parallel = false;
  int threads = 0;  // 0: TWOLEVEL_THREADS or hardware concurrency
  Diagonal diagonal = Diagonal::main;
  ErrorReference error_reference = ErrorReference::interpolant;
};

/// Exponent p used for the scaled error column when none is configured: the
/// order the error bound predicts for the chosen method.
inline int default_scale_exponent(const RunConfig& c) {
  switch (c.algorithm) {
    case Algorithm::galerkin: return c.l;
    case Algorithm::two_level: return std::min(c.s, c.l + c.k);
    case Algorithm::two_grid: return c.fine_factor == 0 ? std::min(2 * c.l, c.l + c.k) : c.l;
  }
  return c.l;
}

inline int scale_exponent(const RunConfig& c) { return c.scale_exponent.value_or(default_scale_exponent(c)); }

inline void validate(const RunConfig& c) {
  if (!c.problem_file && c.example != 1 && c.example != 2) throw ConfigError("--example must be 1 or 2");
  if (c.M_list.empty()) throw ConfigError("no mesh sizes given");
  for (int M : c.M_list) {
    if (M < 1) throw ConfigError("mesh sizes must be >= 1");
  }
  if (c.l < 1 || c.l > kMaxDegree) throw ConfigError("--l must lie in [1, 6]");
  if (c.fine_factor < 0) throw ConfigError("--fine-factor must be 'square' or a positive integer");
  TwoLevelConfig t;
  t.coarse_degree = c.l;
  t.fine_degree = c.s;
  t.iterations = c.k;
  switch (c.algorithm) {
    case Algorithm::galerkin: break;
    case Algorithm::two_level: validate_two_level(t); break;
    case Algorithm::two_grid:
      for (int M : c.M_list) {
        t.fine_factor = c.fine_factor == 0 ? M : c.fine_factor;
        validate_two_grid(t);
        if (static_cast<long long>(M) * t.fine_factor > kDefaultMaxSubdivisions) {
          throw ConfigError("fine mesh for M=" + std::to_string(M) + " exceeds the size cap");
        }
      }
      break;
  }
}

inline ProblemSpec problem_for(const RunConfig& c) {
  if (c.problem_file) return load_problem_file(*c.problem_file);
  return c.example == 1 ? example1() : example2();
}

/// Runs one configuration at one mesh size. Solver and size failures are
/// reported through the row; cpu_seconds covers assembly, transfer and all
/// solves but not mesh/space construction or the error computation.
inline ExperimentRow run_row(const ProblemSpec& spec, const RunConfig& c, int M) {
  ExperimentRow row;
  row.M = M;
  row.H = 1.0 / M;
  row.l = c.l;
  row.k = c.algorithm == Algorithm::galerkin ? 0 : c.k;
  try {
    auto mesh = std::make_shared<const Mesh>(build_structured_mesh(M, c.diagonal));
    const FeSpace coarse(mesh, c.l);
    SolverOptions solver;
    solver.iterative = c.iterative;
    TwoLevelConfig t;
    t.coarse_degree = c.l;
    t.fine_degree = c.s;
    t.iterations = c.k;
    t.coarse_solver = solver;
    t.fine_solver = solver;
    t.stop_tolerance = c.stop_tolerance;

    Vector solution;
    std::unique_ptr<FeSpace> fine;
    switch (c.algorithm) {
      case Algorithm::galerkin:
        row.s_or_r = c.l;
        row.cpu_seconds = time_run([&] { solution = galerkin_solve(coarse, spec, solver); });
        break;
      case Algorithm::two_level:
        row.s_or_r = c.s;
        fine = std::make_unique<FeSpace>(mesh, c.s);
        row.cpu_seconds = time_run([&] { solution = two_level_iterate(spec, coarse, *fine, t).solution; });
        break;
      case Algorithm::two_grid: {
        const int r = c.fine_factor == 0 ? M : c.fine_factor;
        row.s_or_r = r;
        fine = std::make_unique<FeSpace>(std::make_shared<const Mesh>(refine_nested(*mesh, r)), c.l);
        row.cpu_seconds = time_run([&] { solution = two_grid_iterate(spec, coarse, *fine, t).solution; });
        break;
      }
    }
    const FeSpace& out_space = fine ? *fine : coarse;
    row.dofs_coarse = coarse.num_dofs();
    row.dofs_fine = out_space.num_dofs();
    if (spec.has_exact_solution()) {
      row.h1_error = c.error_reference == ErrorReference::exact
                         ? h1_error(out_space, solution, *spec.exact_u, *spec.exact_grad_u)
                         : interpolant_h1_error(out_space, solution, *spec.exact_u);
    } else {
      row.h1_error = std::numeric_limits<double>::quiet_NaN();
    }
    row.scaled_error = scaled_error(row.h1_error, M, scale_exponent(c));
  } catch (const Error& e) {
    row.failed = true;
    row.failure = e.what();
  }
  return row;
}

inline int configured_threads(const RunConfig& c) {
  int n = c.threads;
  if (n <= 0) {
    if (const char* env = std::getenv("TWOLEVEL_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return n;
}

/// One row per entry of M_list, in order. Rows run sequentially unless
/// `parallel` is set, in which case timings are dropped.
inline std::vector<ExperimentRow> run_experiment(const RunConfig& c) {
  validate(c);
  const ProblemSpec spec = problem_for(c);
  std::vector<ExperimentRow> rows(c.M_list.size());
  if (!c.parallel) {
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = run_row(spec, c, c.M_list[i]);
    return rows;
  }
  const int n_threads = std::min<int>(configured_threads(c), static_cast<int>(rows.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) {
        rows[i] = run_row(spec, c, c.M_list[i]);
        rows[i].timed = false;
      }
    });
  }
  for (auto& th : pool) th.join();
  return rows;
}

inline std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

inline std::string format_fraction(int M) { return "1/" + std::to_string(M); }

inline void write_csv(std::ostream& os, const std::vector<ExperimentRow>& rows) {
  os << "M,H,l,s_or_r,k,dofs_coarse,dofs_fine,h1_error,scaled_error,cpu_seconds\n";
  for (const auto& r : rows) {
    os << r.M << ',' << format_sci(r.H) << ',' << r.l << ',' << r.s_or_r << ',' << r.k << ','
       << r.dofs_coarse << ',' << r.dofs_fine << ',';
    if (r.failed) {
      os << "failed,failed,";
    } else {
      os << format_sci(r.h1_error) << ',' << format_sci(r.scaled_error) << ',';
    }
    if (r.timed && !r.failed) os << format_sci(r.cpu_seconds);
    os << '\n';
  }
}

inline void write_markdown(std::ostream& os, const std::vector<ExperimentRow>& rows, int p) {
  os << "| H | l | s/r | k | dof coarse | dof fine | H1 error | error*H^-" << p << " | CPU (s) |\n";
  os << "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    os << "| " << format_fraction(r.M) << " | " << r.l << " | " << r.s_or_r << " | " << r.k << " | "
       << r.dofs_coarse << " | " << r.dofs_fine << " | ";
    if (r.failed) {
      os << "failed | failed | ";
    } else {
      os << format_sci(r.h1_error) << " | " << format_sci(r.scaled_error) << " | ";
    }
    if (r.timed && !r.failed) {
      std::ostringstream t;
      t << std::fixed << std::setprecision(4) << r.cpu_seconds;
      os << t.str();
    }
    os << " |\n";
  }
}

/// DOF counts of the coarse spaces V_H^l for each degree, plus the degree
/// `fine_degree` space on the mesh with h = H^2.
struct DofTable {
  std::vector<int> M;
  std::vector<int> degrees;
  int fine_degree = 3;
  std::vector<std::vector<long long>> coarse;  // [row][degree index]
  std::vector<long long> fine;                 // per row
};

inline DofTable dof_table(const std::vector<int>& M_list, const std::vector<int>& degrees, int fine_degree = 3) {
  if (M_list.empty() || degrees.empty()) throw ConfigError("dof table needs mesh sizes and degrees");
  DofTable t{M_list, degrees, fine_degree, {}, {}};
  for (int M : M_list) {
    std::vector<long long> row;
    for (int l : degrees) row.push_back(dof_count(M, l));
    t.coarse.push_back(std::move(row));
    t.fine.push_back(dof_count(M * M, fine_degree));
  }
  return t;
}

inline void write_dof_table(std::ostream& os, const DofTable& t, OutputFormat format) {
  const bool md = format == OutputFormat::markdown;
  const char* sep = md ? " | " : ",";
  auto header = [&](std::ostream& o) {
    o << (md ? "| T_H" : "M");
    for (std::size_t d = 0; d < t.degrees.size(); ++d) {
      o << sep << "dof(V_H^" << t.degrees[d] << ")";
      if (t.degrees[d] == t.fine_degree) o << sep << "dof(V_h^" << t.fine_degree << ")";
    }
    o << (md ? " |\n" : "\n");
  };
  header(os);
  if (md) {
    os << "|---";
    for (std::size_t d = 0; d < t.degrees.size(); ++d) os << (t.degrees[d] == t.fine_degree ? "|---|---" : "|---");
    os << "|\n";
  }
  for (std::size_t i = 0; i < t.M.size(); ++i) {
    os << (md ? "| " + format_fraction(t.M[i]) : std::to_string(t.M[i]));
    for (std::size_t d = 0; d < t.degrees.size(); ++d) {
      os << sep << t.coarse[i][d];
      if (t.degrees[d] == t.fine_degree) os << sep << t.fine[i];
    }
    os << (md ? " |\n" : "\n");
  }
}

}  // namespace twolevel
