#include "cloudsep/measure.hpp"

#include "cloudsep/errors.hpp"
#include "detail/spec_moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

namespace cloudsep {
namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_intersect(cplx p1, cplx p2, cplx q1, cplx q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_segment = [](cplx a, cplx b, cplx p) {
    return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
           std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
  };
  return (d1 == 0 && on_segment(q1, q2, p1)) || (d2 == 0 && on_segment(q1, q2, p2)) ||
         (d3 == 0 && on_segment(p1, p2, q1)) || (d4 == 0 && on_segment(p1, p2, q2));
}

void require(bool ok, const std::string &what) {
  if (!ok)
    throw Error(ErrorKind::InvalidInput, what);
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void validate_polygon(const Polygon &p) {
  const auto &v = p.vertices;
  const int n = static_cast<int>(v.size());
  require(n >= 3, "polygon needs at least 3 vertices");
  for (const auto &z : v)
    require(finite(z), "polygon vertex is not finite");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent)
        continue;
      require(!segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]),
              "polygon is self-intersecting");
    }
  double twice_area = 0;
  for (int i = 0; i < n; ++i)
    twice_area += cross(v[i], v[(i + 1) % n]);
  require(std::abs(twice_area) > 0, "polygon has zero area");
}

} // namespace

void MeasureSpec::validate() const {
  if (empty())
    throw Error(ErrorKind::EmptyMeasure, "measure has no components");
  for (const auto &s : shapes) {
    require(std::isfinite(s.weight) && s.weight > 0, "shape weight must be positive");
    std::visit(
        [](const auto &k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Disk>) {
            require(finite(k.center), "disk center is not finite");
            require(std::isfinite(k.radius) && k.radius > 0, "disk radius must be positive");
          } else if constexpr (std::is_same_v<K, Ellipse>) {
            require(finite(k.center) && std::isfinite(k.angle), "ellipse parameters not finite");
            require(std::isfinite(k.semi_major) && k.semi_minor > 0 && k.semi_major >= k.semi_minor,
                    "ellipse semi-axes must satisfy a >= b > 0");
          } else {
            validate_polygon(k);
          }
        },
        s.kind);
  }
  for (const auto &a : atoms) {
    require(finite(a.location), "atom location is not finite");
    require(std::isfinite(a.mass) && a.mass > 0, "atom mass must be positive");
  }
  for (const auto &p : samples) {
    require(finite(p.location), "sample location is not finite");
    require(std::isfinite(p.weight) && p.weight > 0, "sample weight must be positive");
  }
}

double shape_area(const UniformShape &shape) {
  return std::visit(
      [](const auto &k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Disk>)
          return std::numbers::pi * k.radius * k.radius;
        else if constexpr (std::is_same_v<K, Ellipse>)
          return std::numbers::pi * k.semi_major * k.semi_minor;
        else {
          double twice = 0;
          const auto &v = k.vertices;
          for (std::size_t i = 0; i < v.size(); ++i)
            twice += cross(v[i], v[(i + 1) % v.size()]);
          return std::abs(twice) / 2;
        }
      },
      shape.kind);
}

double MeasureSpec::total_mass() const {
  double m = 0;
  for (const auto &s : shapes)
    m += s.weight * shape_area(s);
  for (const auto &a : atoms)
    m += a.mass;
  for (const auto &p : samples)
    m += p.weight;
  return m;
}

double MeasureSpec::support_radius() const {
  double r = 0;
  for (const auto &s : shapes)
    r = std::max(r, std::visit(
                        [](const auto &k) -> double {
                          using K = std::decay_t<decltype(k)>;
                          if constexpr (std::is_same_v<K, Disk>)
                            return std::abs(k.center) + k.radius;
                          else if constexpr (std::is_same_v<K, Ellipse>)
                            return std::abs(k.center) + k.semi_major;
                          else {
                            double m = 0;
                            for (const auto &v : k.vertices)
                              m = std::max(m, std::abs(v));
                            return m;
                          }
                        },
                        s.kind));
  for (const auto &a : atoms)
    r = std::max(r, std::abs(a.location));
  for (const auto &p : samples)
    r = std::max(r, std::abs(p.location));
  return r;
}

int MeasureSpec::distinct_points() const {
  std::set<std::pair<double, double>> seen;
  for (const auto &a : atoms)
    seen.emplace(a.location.real(), a.location.imag());
  for (const auto &p : samples)
    seen.emplace(p.location.real(), p.location.imag());
  return static_cast<int>(seen.size());
}

MeasureSpec &MeasureSpec::operator+=(const MeasureSpec &other) {
  shapes.insert(shapes.end(), other.shapes.begin(), other.shapes.end());
  atoms.insert(atoms.end(), other.atoms.begin(), other.atoms.end());
  samples.insert(samples.end(), other.samples.begin(), other.samples.end());
  return *this;
}

MeasureSpec operator+(MeasureSpec lhs, const MeasureSpec &rhs) { return lhs += rhs; }

ComplexMoments ComplexMoments::truncated(int degree_) const {
  if (degree_ < 0 || degree_ > degree)
    throw Error(ErrorKind::DegreeOutOfRange, "cannot truncate moments of degree " +
                                                 std::to_string(degree) + " to " +
                                                 std::to_string(degree_));
  return {degree_, entries.topLeftCorner(degree_ + 1, degree_ + 1)};
}

ComplexMoments moments_of_spec(const MeasureSpec &spec, int degree) {
  if (degree < 0)
    throw Error(ErrorKind::InvalidInput, "moment degree must be non-negative");
  const auto s = detail::spec_moments<double>(spec, degree, std::numeric_limits<double>::epsilon());
  ComplexMoments m{degree, Eigen::MatrixXcd(degree + 1, degree + 1)};
  for (int k = 0; k <= degree; ++k)
    for (int l = 0; l <= degree; ++l)
      m.entries(k, l) = s(k, l).to_std();
  return m;
}

ComplexMoments moments_of_samples(const SampleCloud &cloud, int degree) {
  if (cloud.empty())
    throw Error(ErrorKind::EmptyMeasure, "sample cloud is empty");
  if (degree < 0)
    throw Error(ErrorKind::InvalidInput, "moment degree must be non-negative");
  const int n = degree + 1;
  const int count = static_cast<int>(cloud.size());
  // s = V^T W conj(V) with V[i][k] = z_i^k
  Eigen::MatrixXcd v(count, n);
  Eigen::VectorXd w(count);
  for (int i = 0; i < count; ++i) {
    const auto &p = cloud[i];
    if (!finite(p.location) || !std::isfinite(p.weight) || p.weight <= 0)
      throw Error(ErrorKind::InvalidInput, "sample " + std::to_string(i) +
                                               " has a non-finite location or non-positive weight");
    w[i] = p.weight;
    cplx z = 1.0;
    for (int k = 0; k < n; ++k) {
      v(i, k) = z;
      z *= p.location;
    }
  }
  Eigen::MatrixXcd s = v.transpose() * w.asDiagonal() * v.conjugate();
  // Hermitian by construction: take the lower triangle and mirror it
  for (int k = 0; k < n; ++k) {
    s(k, k) = s(k, k).real();
    for (int l = 0; l < k; ++l)
      s(l, k) = std::conj(s(k, l));
  }
  return {degree, std::move(s)};
}

ComplexMoments operator+(const ComplexMoments &a, const ComplexMoments &b) {
  if (a.degree != b.degree)
    throw Error(ErrorKind::InvalidInput, "cannot add moments of different degree");
  return {a.degree, a.entries + b.entries};
}

} // namespace cloudsep
