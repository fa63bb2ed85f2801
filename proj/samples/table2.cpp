// Two-level iterate for the sine example on one mesh, compared with a plain
// Galerkin solve in the same fine space.
#include <cstdio>
#include <cstdlib>
#include <memory>

#include "twolevel/twolevel.hpp"

int main(int argc, char** argv) {
  using namespace twolevel;
  const int M = argc > 1 ? std::atoi(argv[1]) : 9;

  const ProblemSpec spec = example1();
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(M, Diagonal::main));
  const FeSpace coarse(mesh, 3);
  const FeSpace fine(mesh, 6);

  TwoLevelConfig cfg;
  cfg.coarse_degree = 3;
  cfg.fine_degree = 6;
  cfg.iterations = 3;
  const IterationResult res = two_level_iterate(spec, coarse, fine, cfg);
  const Vector direct = galerkin_solve(fine, spec, {});

  std::printf("M = %d, coarse dofs %d, fine dofs %d\n", M, coarse.num_dofs(), fine.num_dofs());
  for (std::size_t i = 1; i < res.iterates.size(); ++i) {
    const double e = h1_error(fine, res.iterates[i], *spec.exact_u, *spec.exact_grad_u);
    std::printf("  round %zu: |u - u_k|_1 = %.6e\n", i, e);
  }
  std::printf("  galerkin : |u - u_h|_1 = %.6e\n", h1_error(fine, direct, *spec.exact_u, *spec.exact_grad_u));
  std::printf("  |I u - u_k|_1 = %.6e\n", interpolant_h1_error(fine, res.solution, *spec.exact_u));
  return 0;
}
