#pragma once

// Pivot-free Cholesky of the monomial Gram matrix and the Hessenberg matrix
// read off the factor. Templated on the real type so the same code serves
// the double route and the MPFR route.
//
// Conventions: G[i][j] = <z^j, z^i> = s(j, i), G = R^H R with R upper
// triangular and positive diagonal. Then z^j = sum_n p_n R[n][j], hence
// p_n = sum_i (R^{-1})[i][n] z^i, and multiplication by z maps p_k to
// sum_n (U R^{-1})[n][k] p_n where U[n][k] = R[n][k+1].

#include "cloudsep/errors.hpp"
#include "cloudsep/orthopoly.hpp"
#include "detail/xcomplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace cloudsep::detail {

template <class T> struct GramFactor {
  int rank = 0;
  int cols = 0;
  CMatrix<T> r;                     // rank x cols; row n valid from column n on
  std::vector<double> pivot_ratio;  // R[n][n]^2 / G[n][n]
  double max_cancellation_bits = 0; // max over pivots of log2(G[n][n] / R[n][n]^2)
  double shift = 0;                 // relative diagonal shift actually applied
};

namespace gram_impl {

// One attempt with a fixed relative diagonal shift. Returns false when a
// non-positive pivot is met and `stop_on_small` is off.
template <class T>
bool factor_attempt(const CMatrix<T> &s, int rows, const T &tau, double shift, bool stop_on_small,
                    GramFactor<T> &out) {
  using std::sqrt;
  const int cols = s.rows;
  out = GramFactor<T>{};
  out.cols = cols;
  out.shift = shift;
  out.r = CMatrix<T>(rows, cols);
  const T one_plus(1.0 + shift);
  for (int n = 0; n < rows; ++n) {
    const T gnn = s(n, n).re;
    T d = gnn * one_plus;
    for (int i = 0; i < n; ++i)
      d -= norm(out.r(i, n));
    if (!(d > tau * gnn)) {
      if (d < -tau * gnn && stop_on_small)
        throw Error(ErrorKind::NotAMomentMatrix,
                    "Gram matrix is indefinite at degree " + std::to_string(n) +
                        " (relative pivot " + std::to_string(to_double(T(d / gnn))) + ")",
                    to_double(T(d / gnn)));
      if (stop_on_small) {
        out.rank = n;
        return true;
      }
      return false;
    }
    const T rnn = sqrt(d);
    out.r(n, n) = xcomplex<T>(rnn, T(0));
    const double ratio = to_double(T(d / gnn));
    out.pivot_ratio.push_back(ratio);
    out.max_cancellation_bits = std::max(out.max_cancellation_bits, -std::log2(ratio));
    const T inv = T(1) / rnn;
    for (int j = n + 1; j < cols; ++j) {
      // G[n][j] = s(j, n)
      xcomplex<T> acc = s(j, n);
      for (int i = 0; i < n; ++i) {
        // acc -= conj(R[i][n]) * R[i][j]
        const auto &a = out.r(i, n);
        const auto &b = out.r(i, j);
        acc.re -= a.re * b.re + a.im * b.im;
        acc.im -= a.re * b.im - a.im * b.re;
      }
      acc *= inv;
      out.r(n, j) = acc;
    }
    out.rank = n + 1;
  }
  return true;
}

} // namespace gram_impl

// Factors the Gram matrix of moments `s` (degree = s.rows - 1), computing at
// most `rows` rows of R. Under RankPolicy::detect a relative pivot below tau
// ends the factorization and fixes the rank; under RankPolicy::full a
// diagonal shift sigma * diag(G) is added and grown until every pivot
// clears tau.
template <class T>
GramFactor<T> factor_gram(const CMatrix<T> &s, int rows, const T &tau, RankPolicy policy) {
  if (s.rows == 0 || !(s(0, 0).re > T(0)))
    throw Error(ErrorKind::EmptyMeasure, "moment s00 is not positive");
  rows = std::min(rows, s.rows);
  GramFactor<T> f;
  if (policy == RankPolicy::detect) {
    gram_impl::factor_attempt(s, rows, tau, 0.0, true, f);
    if (f.rank == 0)
      throw Error(ErrorKind::EmptyMeasure, "Gram matrix has rank 0");
    return f;
  }
  if (gram_impl::factor_attempt(s, rows, tau, 0.0, false, f))
    return f;
  for (double shift = std::max(to_double(tau), 1e-15); shift <= 1e-2; shift *= 10)
    if (gram_impl::factor_attempt(s, rows, tau, shift, false, f))
      return f;
  throw Error(ErrorKind::NotAMomentMatrix,
              "Gram matrix stays indefinite after a relative diagonal shift of 1e-2");
}

// Matrix of z in the orthonormal basis: entry (n, k) for n < nrows, k < ncols.
// Needs nrows <= rank and ncols <= min(rank, cols - 1).
template <class T> CMatrix<T> hessenberg_from_factor(const GramFactor<T> &f, int nrows, int ncols) {
  CMatrix<T> h(nrows, ncols);
  std::vector<T> inv_diag(ncols);
  for (int k = 0; k < ncols; ++k)
    inv_diag[k] = T(1) / f.r(k, k).re;
  for (int n = 0; n < nrows; ++n) {
    const int first = std::max(0, n - 1);
    for (int k = first; k < ncols; ++k) {
      // (H R)[n][k] = R[n][k+1]
      xcomplex<T> acc = n <= k + 1 ? f.r(n, k + 1) : xcomplex<T>();
      for (int i = first; i < k; ++i) {
        const auto &a = h(n, i);
        const auto &b = f.r(i, k);
        acc.re -= a.re * b.re - a.im * b.im;
        acc.im -= a.re * b.im + a.im * b.re;
      }
      acc *= inv_diag[k];
      h(n, k) = acc;
    }
  }
  return h;
}

// Inverse of the leading n x n block of R (upper triangular).
template <class T> CMatrix<T> triangular_inverse(const GramFactor<T> &f, int n) {
  CMatrix<T> c(n, n);
  for (int j = 0; j < n; ++j) {
    c(j, j) = xcomplex<T>(T(T(1) / f.r(j, j).re), T(0));
    for (int i = j - 1; i >= 0; --i) {
      xcomplex<T> acc;
      for (int m = i + 1; m <= j; ++m)
        add_product(acc, f.r(i, m), c(m, j));
      c(i, j) = acc * T(T(-1) / f.r(i, i).re);
    }
  }
  return c;
}

} // namespace cloudsep::detail
