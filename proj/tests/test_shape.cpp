#include "cloudsep/errors.hpp"
#include "cloudsep/pipeline.hpp"
#include "cloudsep/shape.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cloudsep;
using std::numbers::pi;

namespace {

ComplexMoments diskMoments(int d) {
  ComplexMoments m{d, Eigen::MatrixXcd::Zero(d + 1, d + 1)};
  for (int k = 0; k <= d; ++k)
    m.entries(k, k) = pi / (k + 1);
  return m;
}

CellLabel labelAt(const ComplexMoments &m, cplx z, int n1, int n2) {
  const Box b{z.real(), z.real(), z.imag(), z.imag()};
  return classifyGrid(m, b, 1, 1, n1, n2).labels[0];
}

} // namespace

TEST_CASE("classification of single points for exact disk moments") {
  const auto m = diskMoments(32);
  CHECK(labelAt(m, 0, 8, 16) == CellLabel::interior);
  CHECK(labelAt(m, 1.4, 8, 16) == CellLabel::exterior);
  CHECK(labelAt(m, {0, 1}, 16, 32) == CellLabel::boundary);
  const auto g = classifyGrid(m, {0, 0, 0, 0}, 1, 1, 8, 16);
  CHECK(g.lambda_low[0] == doctest::Approx(pi));
  CHECK(g.lambda_high[0] == doctest::Approx(pi));
}

TEST_CASE("classifyRatio thresholds") {
  CHECK(classifyRatio(1, 0.5, 0.5, 0.1) == CellLabel::interior);
  CHECK(classifyRatio(1, 0.1, 0.5, 0.1) == CellLabel::exterior);
  CHECK(classifyRatio(1, 0.3, 0.5, 0.1) == CellLabel::boundary);
  CHECK(to_string(CellLabel::boundary) == "boundary");
}

TEST_CASE("interior stability on a 41x41 grid for exact disk moments") {
  const auto g = classifyGrid(diskMoments(32), Box{}, 41, 41, 16, 32);
  int considered = 0, correct = 0;
  for (int iy = 0; iy < 41; ++iy)
    for (int ix = 0; ix < 41; ++ix) {
      const double r = std::abs(g.point(ix, iy));
      if (std::abs(r - 1) < 0.15)
        continue;
      ++considered;
      const auto expected = r < 1 ? CellLabel::interior : CellLabel::exterior;
      correct += g.label(ix, iy) == expected;
    }
  CHECK(correct >= 0.95 * considered);
  CHECK(connectedComponents(g).count == 1);
  CHECK(g.warnings.empty());
}

TEST_CASE("Lambda is non-increasing in n at every node") {
  MeasureSpec s = scenario("ellipse");
  const auto m = moments_of_spec(s, 16);
  const auto b = orthonormalize(m);
  const auto g = classifyGrid(m, Box{-2, 2, -2, 2}, 9, 9, 4, 12);
  for (int iy = 0; iy < 9; ++iy)
    for (int ix = 0; ix < 9; ++ix) {
      const auto seq = christoffelSequence(b, 12, g.point(ix, iy));
      for (std::size_t n = 1; n < seq.size(); ++n)
        CHECK(seq[n] <= seq[n - 1] * (1 + 1e-9));
    }
}

TEST_CASE("labels are deterministic") {
  const auto m = moments_of_spec(scenario("polygon"), 20);
  const auto a = classifyGrid(m, Box{}, 21, 17, 8, 16);
  const auto b = classifyGrid(m, Box{}, 21, 17, 8, 16);
  CHECK(a.labels == b.labels);
  CHECK(a.lambda_low == b.lambda_low);
  CHECK(a.lambda_high == b.lambda_high);
}

TEST_CASE("connected components") {
  SUBCASE("two disjoint disks at +-1 with radius 1/2") {
    MeasureSpec s = scenario("archipelago");
    s.atoms.clear();
    const auto m = moments_of_spec(s, 32);
    const auto g = classifyGrid(m, Box{-2, 2, -2, 2}, 61, 61, 16, 32);
    const auto c = connectedComponents(g);
    CHECK(c.count == 2);
    REQUIRE(c.sizes.size() == 2);
    CHECK(c.sizes[0] == doctest::Approx(c.sizes[1]).epsilon(0.1));
  }
  SUBCASE("all-exterior grid") {
    ClassificationGrid g;
    g.nx = 4;
    g.ny = 3;
    g.labels.assign(12, CellLabel::exterior);
    CHECK(connectedComponents(g).count == 0);
  }
  SUBCASE("4-connectivity: diagonal neighbours are separate") {
    ClassificationGrid g;
    g.nx = 2;
    g.ny = 2;
    g.labels = {CellLabel::interior, CellLabel::exterior, CellLabel::exterior, CellLabel::interior};
    const auto c = connectedComponents(g);
    CHECK(c.count == 2);
    CHECK(c.id == std::vector<int>{0, -1, -1, 1});
  }
}

TEST_CASE("atom mass estimates") {
  SUBCASE("single atom: Lambda_n = m") {
    MeasureSpec s;
    s.atoms = {{{0.3, -0.4}, 2.5}};
    const auto e = estimateAtomMass(moments_of_spec(s, 4), {0.3, -0.4}, 0);
    CHECK(e.value == doctest::Approx(2.5));
  }
  SUBCASE("unit disk, z0 = 2: geometric decay below 1e-3") {
    const auto e = estimateAtomMass(diskMoments(16), 2, 16);
    CHECK(e.value <= 1e-3);
    for (std::size_t n = 2; n < e.sequence.size(); ++n)
      CHECK(e.sequence[n] / e.sequence[n - 1] < 0.5);
  }
  SUBCASE("disk plus unit atom at 2: decreasing toward the mass") {
    MeasureSpec s;
    s.shapes.push_back({Disk{{0, 0}, 1.0}, 1.0});
    s.atoms = {{{2, 0}, 1.0}};
    const auto e = estimateAtomMass(moments_of_spec(s, 16), 2, 16);
    for (std::size_t n = 1; n < e.sequence.size(); ++n)
      CHECK(e.sequence[n] <= e.sequence[n - 1] * (1 + 1e-9));
    CHECK(e.value >= 0.5);
    CHECK(e.value >= 1.0 - 1e-6); // an upper bound of the atom's mass
    CHECK(e.value <= 1.01);
  }
  SUBCASE("degree beyond the data") {
    CHECK_THROWS_AS(estimateAtomMass(diskMoments(4), 0, 5), Error);
  }
}

TEST_CASE("classification errors") {
  const auto m = diskMoments(10);
  CHECK_THROWS_AS(classifyGrid(m, Box{}, 5, 5, 8, 16), Error); // degree < n2
  CHECK_THROWS_AS(classifyGrid(m, Box{}, 5, 5, 6, 6), Error);  // n1 >= n2
  MeasureSpec atoms;
  atoms.atoms = {{{0, 0}, 1.0}, {{1, 0}, 1.0}};
  try {
    classifyGrid(moments_of_spec(atoms, 6), Box{}, 3, 3, 2, 4);
    FAIL("expected DegreeOutOfRange");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::DegreeOutOfRange);
  }
  ComplexMoments bad = diskMoments(4);
  bad.entries(3, 3) = -1;
  try {
    classifyGrid(bad, Box{}, 3, 3, 1, 4);
    FAIL("expected NotAMomentMatrix");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::NotAMomentMatrix);
  }
}

TEST_CASE("recovered moments with large envelopes trigger a warning") {
  CloudMoments a;
  a.degree = 4;
  a.entries = diskMoments(4).entries;
  a.envelopes = Eigen::MatrixXd::Zero(5, 5);
  CHECK(classifyGrid(a, Box{}, 3, 3, 2, 4).warnings.empty());
  a.envelopes(2, 3) = 0.05;
  const auto g = classifyGrid(a, Box{}, 3, 3, 2, 4);
  REQUIRE(g.warnings.size() == 1);
  CHECK(g.warnings[0].find("envelopes") != std::string::npos);
}
