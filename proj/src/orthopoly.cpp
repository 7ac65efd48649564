#include "cloudsep/orthopoly.hpp"

#include "cloudsep/errors.hpp"
#include "detail/gram_factor.hpp"
#include "detail/mp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cloudsep {
namespace {

constexpr double kDoubleRankTolerance = 1.4901161193847656e-08; // sqrt(eps)
constexpr double kExtendedRankTolerance = 1e-13;                 // double-valued data
constexpr double kCancellationLimitBits = 20;

void check_hermitian(const ComplexMoments &m) {
  const int n = m.degree + 1;
  if (m.entries.rows() != n || m.entries.cols() != n)
    throw Error(ErrorKind::InvalidInput, "moment matrix shape does not match its degree");
  const double scale = m.entries.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale))
    throw Error(ErrorKind::InvalidInput, "moment matrix has non-finite entries");
  const double skew = (m.entries - m.entries.adjoint()).cwiseAbs().maxCoeff();
  if (skew > 1e-12 * scale)
    throw Error(ErrorKind::NotAMomentMatrix, "moment matrix is not Hermitian", skew / scale);
}

double radius_estimate(const ComplexMoments &m) {
  const double s00 = m.entries(0, 0).real();
  double r = 1;
  for (int k = 1; k <= m.degree; ++k)
    r = std::max(r, std::pow(std::max(m.entries(k, k).real(), 0.0) / s00, 0.5 / k));
  return r;
}

template <class T> detail::CMatrix<T> to_cmatrix(const Eigen::MatrixXcd &e) {
  detail::CMatrix<T> s(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int i = 0; i < s.rows; ++i)
    for (int j = 0; j < s.cols; ++j)
      s(i, j) = detail::xcomplex<T>(e(i, j));
  return s;
}

template <class T> Eigen::MatrixXcd to_eigen(const detail::CMatrix<T> &c) {
  Eigen::MatrixXcd e(c.rows, c.cols);
  for (int i = 0; i < c.rows; ++i)
    for (int j = 0; j < c.cols; ++j)
      e(i, j) = c(i, j).to_std();
  return e;
}

template <class T>
OrthonormalBasis basis_from_factor(const detail::GramFactor<T> &f, int degree, unsigned bits,
                                   double tau) {
  OrthonormalBasis b;
  b.rank = f.rank;
  b.tolerance = tau;
  b.degree = degree;
  b.bits = bits;
  b.shift = f.shift;
  b.pivot_ratio = f.pivot_ratio;
  const auto c = detail::triangular_inverse(f, f.rank);
  b.coeffs = to_eigen(c).transpose();
  b.recurrence = to_eigen(detail::hessenberg_from_factor(f, f.rank, std::min(f.rank, degree)));
  return b;
}

OrthonormalBasis orthonormalize_double(const ComplexMoments &m, RankPolicy policy, double tau) {
  const auto s = to_cmatrix<double>(m.entries);
  const auto f = detail::factor_gram<double>(s, m.degree + 1, tau, policy);
  return basis_from_factor(f, m.degree, 53, tau);
}

OrthonormalBasis orthonormalize_extended(const ComplexMoments &m, RankPolicy policy, double tau,
                                         unsigned bits) {
  detail::PrecisionScope scope(bits);
  const auto s = to_cmatrix<detail::mpreal>(m.entries);
  const auto f = detail::factor_gram<detail::mpreal>(s, m.degree + 1, detail::mpreal(tau), policy);
  return basis_from_factor(f, m.degree, bits, tau);
}

} // namespace

bool OrthonormalBasis::sharp_rank_drop(double gap) const {
  if (rank > degree || rank == 0)
    return false;
  return pivot_ratio[rank - 1] >= gap * tolerance;
}

Eigen::VectorXd OrthonormalBasis::gamma() const {
  Eigen::VectorXd g(rank);
  for (int n = 0; n < rank; ++n)
    g[n] = coeffs(n, n).real();
  return g;
}

Eigen::VectorXcd OrthonormalBasis::evaluate(cplx z, int n) const {
  if (n < 0 || n >= rank)
    throw Error(ErrorKind::DegreeOutOfRange, "degree " + std::to_string(n) +
                                                 " not below basis rank " + std::to_string(rank));
  Eigen::VectorXcd p(n + 1);
  p[0] = coeffs(0, 0);
  for (int k = 0; k < n; ++k) {
    cplx acc = z * p[k];
    for (int i = 0; i <= k; ++i)
      acc -= recurrence(i, k) * p[i];
    p[k + 1] = acc / recurrence(k + 1, k).real();
  }
  return p;
}

OrthonormalBasis orthonormalize(const ComplexMoments &m, const OrthoOptions &options) {
  check_hermitian(m);
  if (!(m.entries(0, 0).real() > 0))
    throw Error(ErrorKind::EmptyMeasure, "moment s00 is not positive");
  const auto &prec = options.precision;
  const double tau_user = options.rank_tolerance;
  if (prec.mode == Precision::Mode::double_precision)
    return orthonormalize_double(m, options.policy, tau_user > 0 ? tau_user : kDoubleRankTolerance);
  if (prec.mode == Precision::Mode::extended)
    return orthonormalize_extended(m, options.policy,
                                   tau_user > 0 ? tau_user : kExtendedRankTolerance, prec.bits);
  // automatic: double unless it detects rank loss or heavy cancellation
  try {
    auto b = orthonormalize_double(m, options.policy,
                                   tau_user > 0 ? tau_user : kDoubleRankTolerance);
    double worst = 0;
    for (double r : b.pivot_ratio)
      worst = std::max(worst, -std::log2(r));
    if (b.rank == m.degree + 1 && b.shift == 0 && worst <= kCancellationLimitBits)
      return b;
  } catch (const Error &e) {
    if (e.kind() != ErrorKind::NotAMomentMatrix)
      throw;
  }
  const unsigned bits = detail::auto_bits(m.degree, radius_estimate(m));
  return orthonormalize_extended(m, options.policy,
                                 tau_user > 0 ? tau_user : kExtendedRankTolerance, bits);
}

cplx cdKernel(const OrthonormalBasis &basis, int n, cplx w, cplx z) {
  if (n < 0 || n >= basis.rank)
    throw Error(ErrorKind::DegreeOutOfRange, "kernel degree " + std::to_string(n) +
                                                 " not below basis rank " +
                                                 std::to_string(basis.rank));
  const auto pw = basis.evaluate(w, n);
  const auto pz = basis.evaluate(z, n);
  cplx k = 0;
  for (int j = 0; j <= n; ++j)
    k += pw[j] * std::conj(pz[j]);
  return k;
}

std::vector<double> christoffelSequence(const OrthonormalBasis &basis, int n, cplx z) {
  const auto p = basis.evaluate(z, n);
  std::vector<double> lambda(n + 1);
  double k = 0;
  for (int j = 0; j <= n; ++j) {
    k += std::norm(p[j]);
    if (!(k > 0))
      throw Error(ErrorKind::InfiniteChristoffel,
                  "K_" + std::to_string(j) + "(z, z) vanishes: point evaluation is unbounded");
    lambda[j] = 1.0 / k;
  }
  return lambda;
}

ChristoffelValue christoffel(const OrthonormalBasis &basis, int n, cplx z) {
  const auto seq = christoffelSequence(basis, n, z);
  return {n, z, seq.back()};
}

} // namespace cloudsep
