#pragma once

// Power moments of a MeasureSpec in an arbitrary real type. Used with double
// for the public moments_of_spec and with MPFR reals for the extended
// Hessenberg route, where the moments must be exact to far more than 53 bits.

#include "cloudsep/errors.hpp"
#include "cloudsep/measure.hpp"
#include "detail/xcomplex.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace cloudsep::detail {

// Gauss-Legendre rule on [0, 1]: double-precision initial guesses polished
// by Newton iteration in T.
template <class T> void gauss_legendre_unit(int n, const T &eps, std::vector<T> &nodes,
                                            std::vector<T> &weights) {
  using std::abs;
  nodes.assign(n, T(0));
  weights.assign(n, T(0));
  for (int i = 0; i < n; ++i) {
    T x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    T dp(0);
    for (int iter = 0; iter < 200; ++iter) {
      T p0(1), p1 = x;
      for (int k = 2; k <= n; ++k) {
        T p2 = (T(2 * k - 1) * x * p1 - T(k - 1) * p0) / T(k);
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = T(n) * (x * p1 - p0) / (x * x - T(1));
      T dx = p1 / dp;
      x -= dx;
      if (abs(dx) <= eps * 4)
        break;
    }
    nodes[i] = (T(1) - x) / 2;
    weights[i] = T(1) / ((T(1) - x * x) * dp * dp);
  }
}

// Accumulates factor * z^k conj(z)^l for k >= l into the lower triangle.
template <class T>
void accumulate_point_moments(CMatrix<T> &s, const xcomplex<T> &z, const T &mass) {
  const int n = s.rows;
  std::vector<xcomplex<T>> pw(n);
  pw[0] = xcomplex<T>(mass, T(0));
  for (int k = 1; k < n; ++k)
    pw[k] = pw[k - 1] * z;
  std::vector<xcomplex<T>> cpw(n);
  cpw[0] = xcomplex<T>(T(1), T(0));
  const xcomplex<T> zc = conj(z);
  for (int l = 1; l < n; ++l)
    cpw[l] = cpw[l - 1] * zc;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l <= k; ++l)
      add_product(s(k, l), pw[k], cpw[l]);
}

// Boundary route: \int_Omega z^k conj(z)^l dA
//   = (1 / (2i (l+1))) \oint z^k conj(z)^{l+1} dz,
// with the contour discretised as points z_t and dz-weights f_t. Lower
// triangle only.
template <class T>
void accumulate_boundary_moments(CMatrix<T> &s, const std::vector<xcomplex<T>> &z,
                                 const std::vector<xcomplex<T>> &dz, const T &weight) {
  const int n = s.rows;
  const int m = static_cast<int>(z.size());
  CMatrix<T> zp(m, n), zc(m, n);
  for (int t = 0; t < m; ++t) {
    zp(t, 0) = xcomplex<T>(T(1), T(0));
    for (int k = 1; k < n; ++k)
      zp(t, k) = zp(t, k - 1) * z[t];
    const xcomplex<T> c = conj(z[t]);
    zc(t, 0) = c * dz[t];
    for (int l = 1; l < n; ++l)
      zc(t, l) = zc(t, l - 1) * c;
  }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l <= k; ++l) {
      xcomplex<T> acc;
      for (int t = 0; t < m; ++t)
        add_product(acc, zp(t, k), zc(t, l));
      // multiply by 1/(2i(l+1)) = -i / (2(l+1))
      const T scale = weight / T(2 * (l + 1));
      s(k, l) += xcomplex<T>(T(acc.im * scale), T(-acc.re * scale));
    }
}

template <class T> void disk_moments(CMatrix<T> &s, const Disk &d, const T &weight) {
  const int n = s.rows;
  const T r(d.radius);
  const T r2 = r * r;
  std::vector<T> diag(n);
  T rp = r2;
  for (int i = 0; i < n; ++i) {
    diag[i] = weight * pi_of<T>() * rp / T(i + 1);
    rp *= r2;
  }
  if (d.center == cplx(0.0, 0.0)) {
    for (int k = 0; k < n; ++k)
      s(k, k).re += diag[k];
    return;
  }
  // z = c + zeta: s = U D U^H with U[k][i] = C(k, i) c^{k-i} (Pascal recurrence).
  const xcomplex<T> c(d.center);
  CMatrix<T> u(n, n);
  u(0, 0) = xcomplex<T>(T(1), T(0));
  for (int k = 0; k + 1 < n; ++k)
    for (int i = 0; i <= k + 1; ++i) {
      xcomplex<T> v;
      if (i <= k)
        v = u(k, i) * c;
      if (i >= 1)
        v += u(k, i - 1);
      u(k + 1, i) = v;
    }
  CMatrix<T> ud = u;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i <= k; ++i)
      ud(k, i) *= diag[i];
  for (int k = 0; k < n; ++k)
    for (int l = 0; l <= k; ++l) {
      xcomplex<T> acc;
      for (int i = 0; i <= l; ++i)
        add_conj_product(acc, u(l, i), ud(k, i));
      s(k, l) += acc;
    }
}

template <class T>
void ellipse_moments(CMatrix<T> &s, const Ellipse &e, const T &weight, const T &tol) {
  using std::cos;
  using std::sin;
  const int n = s.rows;
  const int m = 2 * n + 4; // trapezoid rule exact for trig degree < m
  const T two_pi = 2 * pi_of<T>();
  const T a(e.semi_major), b(e.semi_minor), phi(e.angle);
  const xcomplex<T> rot(T(cos(phi)), T(sin(phi)));
  const xcomplex<T> c(e.center);
  std::vector<xcomplex<T>> z(m), dz(m);
  for (int t = 0; t < m; ++t) {
    const T theta = two_pi * T(t) / T(m);
    const T ct = cos(theta), st = sin(theta);
    z[t] = c + rot * xcomplex<T>(T(a * ct), T(b * st));
    dz[t] = rot * xcomplex<T>(T(-a * st * two_pi / T(m)), T(b * ct * two_pi / T(m)));
  }
  CMatrix<T> part(n, n);
  accumulate_boundary_moments(part, z, dz, weight);
  const T exact = weight * pi_of<T>() * a * b;
  using std::abs;
  const T err = abs(part(0, 0).re - exact) / exact;
  if (err > tol)
    throw Error(ErrorKind::QuadratureFailure, "ellipse moment quadrature off by relative " +
                                                  std::to_string(to_double(err)),
                to_double(err));
  for (std::size_t i = 0; i < s.data.size(); ++i)
    s.data[i] += part.data[i];
}

template <class T>
void polygon_moments(CMatrix<T> &s, const Polygon &poly, const T &weight, const T &eps,
                     const T &tol) {
  const int n = s.rows;
  std::vector<xcomplex<T>> v;
  for (const auto &p : poly.vertices)
    v.emplace_back(p);
  // orientation from the shoelace sum
  T twice_area(0);
  const int nv = static_cast<int>(v.size());
  for (int i = 0; i < nv; ++i) {
    const auto &p = v[i];
    const auto &q = v[(i + 1) % nv];
    twice_area += p.re * q.im - q.re * p.im;
  }
  if (twice_area < 0) {
    std::reverse(v.begin(), v.end());
    twice_area = -twice_area;
  }
  std::vector<T> gx, gw;
  // integrand degree in t is k + l + 1 <= 2n - 1
  gauss_legendre_unit<T>(n + 1, eps, gx, gw);
  std::vector<xcomplex<T>> z, dz;
  for (int i = 0; i < nv; ++i) {
    const auto &p = v[i];
    const auto edge = v[(i + 1) % nv] - p;
    for (std::size_t g = 0; g < gx.size(); ++g) {
      z.push_back(p + edge * gx[g]);
      dz.push_back(edge * gw[g]);
    }
  }
  CMatrix<T> part(n, n);
  accumulate_boundary_moments(part, z, dz, weight);
  const T exact = weight * twice_area / 2;
  using std::abs;
  const T err = abs(part(0, 0).re - exact) / exact;
  if (err > tol)
    throw Error(ErrorKind::QuadratureFailure, "polygon moment quadrature off by relative " +
                                                  std::to_string(to_double(err)),
                to_double(err));
  for (std::size_t i = 0; i < s.data.size(); ++i)
    s.data[i] += part.data[i];
}

// Full Hermitian moment matrix s(k, l), 0 <= k, l <= degree.
template <class T>
CMatrix<T> spec_moments(const MeasureSpec &spec, int degree, const T &eps) {
  spec.validate();
  const int n = degree + 1;
  CMatrix<T> s(n, n);
  using std::sqrt;
  const T tol = std::is_same_v<T, double> ? T(1e-11) : T(sqrt(eps));
  for (const auto &shape : spec.shapes) {
    const T w(shape.weight);
    std::visit(
        [&](const auto &k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Disk>)
            disk_moments(s, k, w);
          else if constexpr (std::is_same_v<K, Ellipse>)
            ellipse_moments(s, k, w, tol);
          else
            polygon_moments(s, k, w, eps, tol);
        },
        shape.kind);
  }
  for (const auto &a : spec.atoms)
    accumulate_point_moments(s, xcomplex<T>(a.location), T(a.mass));
  for (const auto &p : spec.samples)
    accumulate_point_moments(s, xcomplex<T>(p.location), T(p.weight));
  // mirror the lower triangle; the diagonal is real by construction
  for (int k = 0; k < n; ++k) {
    s(k, k).im = T(0);
    for (int l = 0; l < k; ++l)
      s(l, k) = conj(s(k, l));
  }
  return s;
}

} // namespace cloudsep::detail
