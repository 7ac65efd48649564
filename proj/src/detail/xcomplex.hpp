#pragma once

// Minimal complex arithmetic over an arbitrary real type. std::complex is
// only specified for the builtin floating types, and MPFR reals need it too.

#include "detail/mp.hpp"

#include <complex>
#include <vector>

namespace cloudsep::detail {

template <class T> struct xcomplex {
  T re{0};
  T im{0};

  xcomplex() = default;
  xcomplex(T r, T i) : re(std::move(r)), im(std::move(i)) {}
  explicit xcomplex(const std::complex<double> &z) : re(z.real()), im(z.imag()) {}

  xcomplex &operator+=(const xcomplex &o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  xcomplex &operator-=(const xcomplex &o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  xcomplex &operator*=(const T &s) {
    re *= s;
    im *= s;
    return *this;
  }
  std::complex<double> to_std() const { return {to_double(re), to_double(im)}; }
};

template <class T> xcomplex<T> operator+(xcomplex<T> a, const xcomplex<T> &b) { return a += b; }
template <class T> xcomplex<T> operator-(xcomplex<T> a, const xcomplex<T> &b) { return a -= b; }
template <class T> xcomplex<T> operator*(const xcomplex<T> &a, const xcomplex<T> &b) {
  return {T(a.re * b.re - a.im * b.im), T(a.re * b.im + a.im * b.re)};
}
template <class T> xcomplex<T> operator*(xcomplex<T> a, const T &s) { return a *= s; }
template <class T> xcomplex<T> conj(const xcomplex<T> &a) { return {a.re, T(-a.im)}; }
template <class T> T norm(const xcomplex<T> &a) { return T(a.re * a.re + a.im * a.im); }

// acc += conj(a) * b
template <class T> void add_conj_product(xcomplex<T> &acc, const xcomplex<T> &a, const xcomplex<T> &b) {
  acc.re += a.re * b.re + a.im * b.im;
  acc.im += a.re * b.im - a.im * b.re;
}

// acc += a * b
template <class T> void add_product(xcomplex<T> &acc, const xcomplex<T> &a, const xcomplex<T> &b) {
  acc.re += a.re * b.re - a.im * b.im;
  acc.im += a.re * b.im + a.im * b.re;
}

// Dense row-major matrix of xcomplex<T>.
template <class T> struct CMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<xcomplex<T>> data;

  CMatrix() = default;
  CMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}

  xcomplex<T> &operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  const xcomplex<T> &operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
};

} // namespace cloudsep::detail
