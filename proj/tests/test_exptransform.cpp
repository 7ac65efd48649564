#include "cloudsep/errors.hpp"
#include "cloudsep/exptransform.hpp"
#include "cloudsep/pipeline.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cloudsep;
using std::numbers::pi;

namespace {

Eigen::MatrixXcd shapeMoments(const std::vector<UniformShape> &shapes, int d) {
  MeasureSpec s;
  s.shapes = shapes;
  return moments_of_spec(s, d).entries;
}

Eigen::MatrixXcd diskMoments(cplx c, double r, int d) {
  return shapeMoments({{Disk{c, r}, 1.0}}, d);
}

double minEigen(const Eigen::MatrixXcd &m) {
  const Eigen::MatrixXcd h = (m + m.adjoint()) / 2.0;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues()(0);
}

// Cloud moments of the unit disk recovered from its Bergman shift.
CloudMoments recoveredDisk(int d, int J) {
  HessenbergMatrix H;
  H.size = J + 2 * d + 2 + kDefaultMargin;
  H.entries = Eigen::MatrixXcd::Zero(H.size, H.size);
  for (int k = 0; k + 1 < H.size; ++k)
    H.entries(k + 1, k) = std::sqrt((k + 1.0) / (k + 2.0));
  return cloudMoments(H, d, J);
}

} // namespace

TEST_CASE("zero moments give the trivial transform") {
  const auto s = expSeries(Eigen::MatrixXcd::Zero(4, 4), 3);
  CHECK(s.b.cwiseAbs().maxCoeff() == 0.0);
  CHECK(selectOrder(s, 3) == 0);
  CHECK_THROWS_AS(padeFit(expSeries(Eigen::MatrixXcd::Zero(3, 3), 2), 1), Error);
  try {
    padeFit(expSeries(Eigen::MatrixXcd::Zero(3, 3), 2), 1);
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::FitIllConditioned);
  }
}

TEST_CASE("unit disk: b[0][0] = -1 and every other coefficient 0") {
  const auto s = expSeries(diskMoments(0, 1, 6), 6);
  for (int m = 0; m <= 6; ++m)
    for (int n = 0; n <= 6; ++n)
      CHECK(std::abs(s.b(m, n) - (m == 0 && n == 0 ? -1.0 : 0.0)) < 1e-13);
  CHECK(s.radius == doctest::Approx(1.0));
  CHECK(selectOrder(s, 3) == 1);
}

TEST_CASE("series matches the naive exponential of the series") {
  for (const auto &name : {"ellipse", "polygon", "archipelago"}) {
    CAPTURE(name);
    const auto a = shapeMoments(scenario(name).shapes, 5);
    const auto s = expSeries(a, 5);
    const auto ref = oracle::naiveExpSeries(a, 5);
    CHECK((s.b - ref).cwiseAbs().maxCoeff() < 1e-12 * (1 + ref.cwiseAbs().maxCoeff()));
    CHECK(std::abs(s.b(0, 0) + a(0, 0) / pi) < 1e-14);
  }
}

TEST_CASE("(-b) is positive semi-definite on valid inputs") {
  for (const auto &name : {"ellipse", "polygon", "archipelago", "shifted-disk", "disk-atoms"}) {
    CAPTURE(name);
    const auto s = expSeries(shapeMoments(scenario(name).shapes, 6), 6);
    CHECK(minEigen(-s.b) >= -1e-10 * s.b.norm());
  }
}

TEST_CASE("exponential transform evaluation") {
  CHECK(std::abs(evalExpDisk(0, 1, 2, 2) - 0.75) < 1e-15);
  SUBCASE("series route on recovered disk moments") {
    const auto a = recoveredDisk(4, 200);
    const auto s = expSeries(a, 4);
    CHECK(std::abs(evalExp(s, 2, 2) - 0.75) < 1e-2);
  }
  SUBCASE("series and closed form agree on exact shifted-disk moments") {
    const cplx c(0.3, -0.2);
    const auto s = expSeries(diskMoments(c, 0.6, 24), 24);
    for (const cplx w : {cplx(2, 1), cplx(-1.5, 2), cplx(0, -3)})
      CHECK(std::abs(evalExp(s, w, cplx(2.2, -0.4)) - evalExpDisk(c, 0.6, w, cplx(2.2, -0.4))) < 1e-10);
  }
  SUBCASE("value tends to 1 at infinity") {
    const auto s = expSeries(diskMoments(0, 1, 4), 4);
    double previous = 1;
    for (double R : {10.0, 100.0, 1000.0}) {
      const double gap = std::abs(evalExp(s, R, 2) - 1.0);
      CHECK(gap < previous);
      previous = gap;
    }
    CHECK(previous < 1e-3);
  }
  SUBCASE("analytic in w away from the support") {
    const auto s = expSeries(shapeMoments(scenario("ellipse").shapes, 8), 8);
    const double R = s.radius;
    const cplx z(2.5 * R, 0.3);
    for (const cplx w : {cplx(2 * R, 0), cplx(0, 2.5 * R), cplx(-1.6 * R, 1.6 * R)}) {
      const double h = 1e-5 * R;
      const cplx fx = (evalExp(s, w + h, z) - evalExp(s, w - h, z)) / (2 * h);
      const cplx fy = (evalExp(s, w + cplx(0, h), z) - evalExp(s, w - cplx(0, h), z)) / (2 * h);
      const cplx dwbar = (fx + cplx(0, 1) * fy) / 2.0;
      const cplx dw = (fx - cplx(0, 1) * fy) / 2.0;
      CHECK(std::abs(dwbar) <= 1e-6 * std::max(std::abs(dw), 1e-3));
    }
  }
  SUBCASE("inside the support radius is refused") {
    const auto s = expSeries(diskMoments(0, 1, 4), 4);
    CHECK_THROWS_AS(evalExp(s, 0.5, 2), Error);
    CHECK_THROWS_AS(evalExpDisk(0, 1, 0.5, 2), Error);
  }
}

TEST_CASE("order-1 fit on exact disk moments") {
  SUBCASE("unit disk: node 0, boundary z conj(z) - 1") {
    const auto model = padeFit(expSeries(diskMoments(0, 1, 2), 2), 1);
    REQUIRE(model.nodes.size() == 1);
    CHECK(std::abs(model.P[0]) < 1e-13);
    CHECK(std::abs(model.nodes[0]) < 1e-13);
    CHECK(std::abs(model.Q(1, 1) - 1.0) < 1e-13);
    CHECK(std::abs(model.Q(0, 0) + 1.0) < 1e-13);
    CHECK(std::abs(model.Q(1, 0)) < 1e-13);
    CHECK(std::abs(model.Q(0, 1)) < 1e-13);
    CHECK(model.residual <= 1e-6);
    for (int t = 0; t < 12; ++t) {
      const cplx z = std::polar(1.0, t * pi / 6);
      CHECK(std::abs(model.boundary(z.real(), z.imag())) < 1e-12);
    }
    CHECK(model.boundary(0, 0) < 0);
    CHECK(model.boundary(2, 0) > 0);
  }
  SUBCASE("translated disk: node c, boundary |z - c|^2 - r^2") {
    const cplx c(0.5, 0.25);
    const double r = 0.75;
    const auto model = padeFit(expSeries(diskMoments(c, r, 2), 2), 1);
    CHECK(std::abs(model.nodes[0] - c) < 1e-10);
    CHECK(std::abs(model.Q(1, 1) - 1.0) < 1e-10);
    CHECK(std::abs(model.Q(1, 0) + std::conj(c)) < 1e-10);
    CHECK(std::abs(model.Q(0, 1) + c) < 1e-10);
    CHECK(std::abs(model.Q(0, 0) - (std::norm(c) - r * r)) < 1e-10);
    CHECK(model.residual <= 1e-6);
    const auto pts = boundaryPoints(model, -1, 2, -1, 1.5, 121, 101);
    REQUIRE(pts.size() > 50);
    for (const auto &p : pts)
      CHECK(std::abs(std::abs(p - c) - r) < 5e-3);
  }
}

TEST_CASE("two disjoint disks: order 2 with nodes at the centers") {
  const auto a = shapeMoments(scenario("archipelago").shapes, 6);
  const auto s = expSeries(a, 6);
  CHECK(selectOrder(s, 3) >= 2);
  const auto model = padeFit(s, 2);
  REQUIRE(model.nodes.size() == 2);
  CHECK(std::abs(model.nodes[0] - cplx(-1, 0)) < 1e-6);
  CHECK(std::abs(model.nodes[1] - cplx(1, 0)) < 1e-6);
  CHECK(model.residual < 1e-6);
  // translation covariance
  const cplx shift(0.3, -0.7);
  const auto moved = shapeMoments({{Disk{-1.0 + shift, 0.5}, 1.0}, {Disk{1.0 + shift, 0.5}, 1.0}}, 6);
  const auto mm = padeFit(expSeries(moved, 6), 2);
  for (int i = 0; i < 2; ++i)
    CHECK(std::abs(mm.nodes[i] - (model.nodes[i] + shift)) < 1e-8);
}

TEST_CASE("recovered disk moments: order-1 fit") {
  const auto a = recoveredDisk(4, 200);
  const auto s = expSeries(a, 4);
  CHECK(std::abs(s.b(0, 0) + 1.0) <= 0.02);
  const auto model = padeFit(s, 1);
  CHECK(std::abs(model.nodes[0]) <= 0.05);
  CHECK(model.residual <= 0.02);
}

TEST_CASE("padeFit preconditions") {
  const auto s = expSeries(diskMoments(0, 1, 3), 3);
  CHECK_THROWS_AS(padeFit(s, 2), Error); // window 3 < 2d
  CHECK_THROWS_AS(padeFit(s, 0), Error);
}
