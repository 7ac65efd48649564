#include "cloudsep/hessenberg.hpp"

#include "cloudsep/errors.hpp"
#include "detail/gram_factor.hpp"
#include "detail/mp.hpp"
#include "detail/spec_moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace cloudsep {
namespace {

template <class T> Eigen::MatrixXcd to_eigen(const detail::CMatrix<T> &c) {
  Eigen::MatrixXcd e(c.rows, c.cols);
  for (int i = 0; i < c.rows; ++i)
    for (int j = 0; j < c.cols; ++j)
      e(i, j) = c(i, j).to_std();
  return e;
}

struct SpecAttempt {
  Eigen::MatrixXcd h;
  int rank = 0;
  double cancellation_bits = 0;
};

// Moments to `degree`, factor `rows` rows, and read off an nh x nh block.
template <class T>
SpecAttempt spec_attempt(const MeasureSpec &spec, int degree, int rows, const T &eps,
                         const T &tau, int wanted) {
  const auto s = detail::spec_moments<T>(spec, degree, eps);
  const auto f = detail::factor_gram<T>(s, rows, tau, RankPolicy::detect);
  SpecAttempt a;
  a.rank = f.rank;
  a.cancellation_bits = f.max_cancellation_bits;
  const int nh = std::min({wanted, f.rank, f.cols - 1});
  a.h = to_eigen(detail::hessenberg_from_factor(f, nh, nh));
  return a;
}

} // namespace

HessenbergMatrix buildHessenberg(const ComplexMoments &m, const OrthonormalBasis &basis, int N) {
  if (basis.degree != m.degree)
    throw Error(ErrorKind::InvalidInput, "basis was built from moments of a different degree");
  if (N < 1)
    throw Error(ErrorKind::DegreeOutOfRange, "Hessenberg size must be positive");
  const int available = static_cast<int>(basis.recurrence.cols());
  const bool whole = basis.sharp_rank_drop(); // finite rank reached inside the data
  if (N > available)
    throw Error(ErrorKind::DegreeOutOfRange,
                "Hessenberg size " + std::to_string(N) + " needs moments of degree " +
                    std::to_string(N) + " and rank " + std::to_string(N + 1) + "; have degree " +
                    std::to_string(m.degree) + ", rank " + std::to_string(basis.rank));
  HessenbergMatrix h;
  h.size = N;
  h.entries = basis.recurrence.topLeftCorner(N, N);
  h.source_degree = m.degree;
  h.complete = whole && N == basis.rank;
  h.bits = basis.bits;
  return h;
}

unsigned autoBits(const MeasureSpec &spec, int N) {
  return detail::auto_bits(N, spec.support_radius()) + (spec.atoms.empty() ? 0u : 64u);
}

HessenbergMatrix hessenbergOfSpec(const MeasureSpec &spec, int N,
                                  const SpecHessenbergOptions &options) {
  spec.validate();
  if (N < 1)
    throw Error(ErrorKind::DegreeOutOfRange, "Hessenberg size must be positive");
  // A purely discrete measure on r points has a complete r x r matrix.
  const bool finite = spec.shapes.empty();
  const int points = spec.distinct_points();
  const int degree = finite ? std::min(N, points) : N;
  const int rows = finite ? degree + 1 : N;
  const int expected = finite ? std::min(points, rows) : rows;

  HessenbergMatrix out;
  out.source_degree = degree;
  SpecAttempt a;
  if (options.precision.is_double()) {
    a = spec_attempt<double>(spec, degree, rows, std::numeric_limits<double>::epsilon(),
                             1.4901161193847656e-08, N);
    out.bits = 53;
  } else {
    unsigned bits = options.precision.mode == Precision::Mode::extended ? options.precision.bits
                                                                       : autoBits(spec, N);
    for (;;) {
      detail::PrecisionScope scope(bits);
      using detail::mpreal;
      const mpreal eps = boost::multiprecision::pow(mpreal(2), -static_cast<int>(bits));
      const mpreal tau = boost::multiprecision::pow(mpreal(2), -static_cast<int>(bits - 96));
      const bool fixed = options.precision.mode == Precision::Mode::extended;
      bool trusted = false;
      try {
        a = spec_attempt<mpreal>(spec, degree, rows, eps, tau, N);
        trusted = a.rank >= expected && a.cancellation_bits <= bits - 128.0;
      } catch (const Error &e) {
        // exact moments only look indefinite when the precision ran out
        if (fixed || e.kind() != ErrorKind::NotAMomentMatrix || bits >= options.max_bits)
          throw;
        bits = std::min(options.max_bits, bits * 3 / 2 + 64);
        continue;
      }
      if (trusted || fixed)
        break;
      if (bits >= options.max_bits)
        throw Error(ErrorKind::NotAMomentMatrix,
                    "moment factorization still loses rank at " + std::to_string(bits) + " bits");
      bits = std::min(options.max_bits, bits * 3 / 2 + 64);
    }
    out.bits = bits;
  }
  out.size = static_cast<int>(a.h.rows());
  out.entries = std::move(a.h);
  out.complete = finite && a.rank == points && out.size == points;
  return out;
}

namespace {

// Arnoldi on the diagonal operator z in l2(weights). Stops at `d + 1`
// vectors or at numerical rank, whichever comes first.
HessenbergMatrix arnoldi(const SampleCloud &cloud, int d, int &rank) {
  if (cloud.empty())
    throw Error(ErrorKind::EmptyMeasure, "sample cloud is empty");
  if (d < 0)
    throw Error(ErrorKind::InvalidInput, "degree must be non-negative");
  const int m = static_cast<int>(cloud.size());
  Eigen::VectorXcd z(m), root_w(m);
  for (int i = 0; i < m; ++i) {
    const auto &s = cloud[i];
    if (!(s.weight > 0) || !std::isfinite(s.weight) || !std::isfinite(s.location.real()) ||
        !std::isfinite(s.location.imag()))
      throw Error(ErrorKind::InvalidInput, "sample " + std::to_string(i) + " is invalid");
    z[i] = s.location;
    root_w[i] = std::sqrt(s.weight);
  }
  const int n = d + 1;
  Eigen::MatrixXcd q(m, n);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  q.col(0) = root_w / root_w.norm();
  rank = n;
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXcd v = z.cwiseProduct(q.col(k));
    const double before = v.norm();
    const int basis = std::min(k + 1, n);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXcd c = q.leftCols(basis).adjoint() * v;
      v -= q.leftCols(basis) * c;
      h.col(k).head(basis) += c;
    }
    if (k + 1 == n)
      break;
    const double beta = v.norm();
    if (!(beta > 1e-10 * std::max(before, 1e-300))) {
      rank = k + 1;
      break;
    }
    h(k + 1, k) = beta;
    q.col(k + 1) = v / beta;
  }
  HessenbergMatrix out;
  out.size = rank;
  out.entries = h.topLeftCorner(rank, rank);
  out.source_degree = d;
  out.complete = rank < n;
  return out;
}

} // namespace

HessenbergMatrix arnoldiHessenberg(const SampleCloud &cloud, int d) {
  int rank = 0;
  auto h = arnoldi(cloud, d, rank);
  if (rank < d + 1)
    throw Error(ErrorKind::RankDeficient,
                "sample cloud spans only " + std::to_string(rank) +
                    " dimensions; need more than " + std::to_string(d) + " distinct points",
                rank);
  return h;
}

HessenbergMatrix arnoldiHessenbergUpTo(const SampleCloud &cloud, int d) {
  int rank = 0;
  return arnoldi(cloud, d, rank);
}

Eigen::MatrixXcd perturbationMatrix(const Perturbation &p, int N) {
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(N, N);
  if (const auto *fr = std::get_if<FiniteRankPerturbation>(&p)) {
    for (const auto &entry : fr->entries) {
      if (entry.row < 0 || entry.col < 0 || entry.row >= N || entry.col >= N)
        throw Error(ErrorKind::InvalidInput, "perturbation entry (" + std::to_string(entry.row) +
                                                 ", " + std::to_string(entry.col) +
                                                 ") outside a " + std::to_string(N) +
                                                 "x" + std::to_string(N) + " matrix");
      e(entry.row, entry.col) += entry.value;
    }
    return e;
  }
  const auto &sr = std::get<ScaledRandomPerturbation>(p);
  if (!(sr.norm >= 0) || !std::isfinite(sr.norm) || !(sr.decay > 0) || sr.decay > 1)
    throw Error(ErrorKind::InvalidInput, "random perturbation needs norm >= 0, decay in (0, 1]");
  if (sr.norm == 0)
    return e;
  std::mt19937_64 rng(sr.seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < N; ++k) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      e(n, k) = cplx(re, im) * std::pow(sr.decay, n + k);
    }
  return e * (sr.norm / e.norm());
}

HessenbergMatrix perturb(const HessenbergMatrix &H, const Perturbation &p) {
  HessenbergMatrix out = H;
  out.entries += perturbationMatrix(p, H.size);
  out.perturbations.push_back(p);
  return out;
}

} // namespace cloudsep
