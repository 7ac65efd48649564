#pragma once

#include <Eigen/Dense>

#include <complex>
#include <variant>
#include <vector>

namespace cloudsep {

using cplx = std::complex<double>;

struct Disk {
  cplx center;
  double radius = 1.0;
};

// Semi-axes a >= b > 0, major axis rotated by `angle` radians.
struct Ellipse {
  cplx center;
  double semi_major = 1.0;
  double semi_minor = 1.0;
  double angle = 0.0;
};

// Simple (non self-intersecting) polygon; either orientation is accepted.
struct Polygon {
  std::vector<cplx> vertices;
};

struct UniformShape {
  std::variant<Disk, Ellipse, Polygon> kind;
  double weight = 1.0;
};

struct Atom {
  cplx location;
  double mass = 1.0;
};

struct Sample {
  cplx location;
  double weight = 1.0;
};

using AtomList = std::vector<Atom>;
using SampleCloud = std::vector<Sample>;

// A planar measure assembled from uniform shapes, point masses and weighted
// samples. All parts are additive.
struct MeasureSpec {
  std::vector<UniformShape> shapes;
  AtomList atoms;
  SampleCloud samples;

  bool empty() const { return shapes.empty() && atoms.empty() && samples.empty(); }
  /// Throws InvalidInput / EmptyMeasure when the invariants do not hold.
  void validate() const;
  double total_mass() const;
  /// Smallest R such that the support lies in the closed disk |z| <= R.
  double support_radius() const;
  /// Number of distinct point locations among atoms and samples.
  int distinct_points() const;

  MeasureSpec &operator+=(const MeasureSpec &other);
};

MeasureSpec operator+(MeasureSpec lhs, const MeasureSpec &rhs);

double shape_area(const UniformShape &shape);

// Power moments s[k][l] = \int z^k conj(z)^l dmu for 0 <= k, l <= degree.
struct ComplexMoments {
  int degree = 0;
  Eigen::MatrixXcd entries;

  double total_mass() const { return entries(0, 0).real(); }
  /// Gram matrix of monomials, G[j][k] = <z^k, z^j> = s[k][j].
  Eigen::MatrixXcd gram() const { return entries.transpose(); }
  /// Leading (degree' + 1) square block.
  ComplexMoments truncated(int degree_) const;
};

ComplexMoments moments_of_spec(const MeasureSpec &spec, int degree);
ComplexMoments moments_of_samples(const SampleCloud &cloud, int degree);

ComplexMoments operator+(const ComplexMoments &a, const ComplexMoments &b);

} // namespace cloudsep
