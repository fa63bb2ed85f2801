#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "../common/properties.hpp"
#include "twolevel/element.hpp"

using namespace twolevel;

namespace {

double integrate(const QuadratureRule& q, int a, int b) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * std::pow(q.points[i].x, a) * std::pow(q.points[i].y, b);
  return s;
}

}  // namespace

TEST(Quadrature, WeightsSumToArea) {
  for (int d = 1; d <= 16; ++d) {
    const QuadratureRule q = build_quadrature(d);
    EXPECT_NEAR(std::accumulate(q.weights.begin(), q.weights.end(), 0.0), 0.5, 1e-15);
    EXPECT_GE(q.exact_degree, d);
    for (const auto& p : q.points) {
      EXPECT_GT(p.x, 0.0);
      EXPECT_GT(p.y, 0.0);
      EXPECT_LT(p.x + p.y, 1.0);
    }
  }
}

TEST(Quadrature, KnownMonomials) {
  EXPECT_NEAR(integrate(build_quadrature(12), 6, 6), 1.0 / 168168.0, 1e-18);
  EXPECT_NEAR(integrate(build_quadrature(4), 2, 2), 1.0 / 180.0, 1e-16);
  EXPECT_NEAR(integrate(build_quadrature(1), 1, 0), 1.0 / 6.0, 1e-15);
}

TEST(Quadrature, GaussLegendreUnit) {
  const auto [x, w] = gauss_legendre_unit(3);
  ASSERT_EQ(x.size(), 3u);
  EXPECT_NEAR(x[1], 0.5, 1e-15);
  EXPECT_NEAR(w[1], 4.0 / 9.0, 1e-15);
  EXPECT_NEAR(x[0], 0.5 - 0.5 * std::sqrt(0.6), 1e-15);
}

TEST(Element, Invariants) { EXPECT_EQ(props::element_invariants(kMaxDegree), ""); }

TEST(Element, P1Basis) {
  const ReferenceElement& e = reference_element(1);
  const BasisEval ev = e.eval({0.25, 0.5});
  EXPECT_NEAR(ev.values[0], 0.25, 1e-15);
  EXPECT_NEAR(ev.values[1], 0.25, 1e-15);
  EXPECT_NEAR(ev.values[2], 0.5, 1e-15);
  EXPECT_NEAR(ev.gradients(0, 0), -1.0, 1e-15);
  EXPECT_NEAR(ev.gradients(2, 1), 1.0, 1e-15);
}

TEST(Element, ReproducesPolynomialsOfItsDegree) {
  for (int l = 1; l <= kMaxDegree; ++l) {
    const ReferenceElement& e = reference_element(l);
    auto poly = [l](Point2 p) { return std::pow(p.x + 2 * p.y + 0.5, l) - (l > 1 ? 3 * p.x * p.y : 0.0); };
    Eigen::VectorXd c(e.num_nodes());
    for (int i = 0; i < e.num_nodes(); ++i) c[i] = poly(e.nodes()[static_cast<std::size_t>(i)]);
    for (const Point2 p : {Point2{0.1, 0.2}, Point2{0.7, 0.1}, Point2{0.3, 0.3}}) {
      EXPECT_NEAR(c.dot(e.values(p)), poly(p), 1e-10) << "l=" << l;
    }
  }
}

TEST(Element, NodesAreEquispaced) {
  const ReferenceElement& e = reference_element(3);
  ASSERT_EQ(e.num_nodes(), 10);
  EXPECT_DOUBLE_EQ(e.nodes()[1].x, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(e.nodes()[4].y, 1.0 / 3.0);
  EXPECT_GT(e.vandermonde_rcond(), 1e-12);
}

TEST(Element, RejectsDegreeOutOfRange) {
  EXPECT_THROW(build_reference_element(0), SizeError);
  EXPECT_THROW(build_reference_element(7), SizeError);
}
