#include "cloudsep/traces.hpp"

#include "cloudsep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace cloudsep {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Tail estimate from two adjacent windows of w increments ending at J:
// the larger of a geometric and a power-law extrapolation. Geometric alone
// underestimates algebraic 1/j^2 tails by about a factor 2; the power law
// alone is loose for fast geometric tails. `noise` is the roundoff level of
// each increment; once the last window is no larger than that, the tail is
// lost in roundoff and the sum's floor stands. Returns nullopt when the
// increments do not decay.
std::optional<double> tail_estimate(const std::vector<double> &mag,
                                    const std::vector<double> &noise, int J, int w, double floor) {
  // Rates come from window sums, which average out the alternation that
  // several components produce; the level comes from the last window's max.
  double s1 = 0, s2 = 0, m2 = 0, n2 = 0;
  for (int j = J - 2 * w + 1; j <= J - w; ++j)
    s1 += mag[j];
  for (int j = J - w + 1; j <= J; ++j) {
    s2 += mag[j];
    m2 = std::max(m2, mag[j]);
    n2 = std::max(n2, noise[j]);
  }
  if (m2 <= n2)
    return floor;
  if (!(s1 > s2))
    return std::nullopt;
  const double r = std::pow(s2 / s1, 1.0 / w);
  const double geometric = m2 * r / (1 - r);
  const double c1 = J - 1.5 * w + 0.5;
  const double c2 = J - 0.5 * w + 0.5;
  const double p = std::log(s1 / s2) / std::log(c2 / c1);
  if (!(p > 1))
    return std::nullopt;
  const double power_law = m2 * (J + 1) / (p - 1);
  return std::max(geometric, power_law);
}

} // namespace

TraceEngine::TraceEngine(const HessenbergMatrix &H) : H_(H) {
  if (H_.size < 1 || H_.entries.rows() != H_.size || H_.entries.cols() != H_.size)
    throw Error(ErrorKind::InvalidInput, "Hessenberg matrix is empty or not square");
  if (!H_.entries.allFinite())
    throw Error(ErrorKind::InvalidInput, "Hessenberg matrix has non-finite entries");
}

const Eigen::MatrixXcd &TraceEngine::power(int m) const {
  if (powers_.empty())
    powers_.push_back(H_.entries);
  while (static_cast<int>(powers_.size()) < m)
    powers_.push_back(powers_.back() * H_.entries);
  return powers_[m - 1];
}

int TraceEngine::maxCutoff(int k, int l, int margin) const {
  if (H_.complete)
    return H_.size - 1;
  return H_.size - (k + l + 2 + margin);
}

cplx TraceEngine::term(int k, int l, int j) const {
  const auto &a = power(k + 1);
  const auto &b = power(l + 1);
  const cplx col = a.col(j).dot(b.col(j)); // sum_n conj(a_nj) b_nj
  const cplx row = (a.row(j).conjugate().cwiseProduct(b.row(j))).sum();
  return col - row;
}

TraceEstimate TraceEngine::trace(int k, int l, int J, int margin) const {
  if (k < 0 || l < 0 || J < 0 || margin < 0)
    throw Error(ErrorKind::InvalidInput, "trace exponents, cutoff and margin must be >= 0");
  const int N = H_.size;
  TraceEstimate t;
  t.k = k;
  t.l = l;
  t.N = N;
  t.exact = H_.complete;
  if (H_.complete) {
    J = std::min(J, N - 1);
  } else if (N < J + k + l + 2 + margin) {
    throw Error(ErrorKind::DegreeOutOfRange,
                "trace (" + std::to_string(k) + ", " + std::to_string(l) + ") up to J = " +
                    std::to_string(J) + " needs a matrix of size >= " +
                    std::to_string(J + k + l + 2 + margin) + ", have " + std::to_string(N));
  }
  t.J = J;
  const auto &a = power(k + 1);
  const auto &b = power(l + 1);
  const Eigen::MatrixXcd prod = a.conjugate().cwiseProduct(b);
  const Eigen::VectorXcd cols = prod.colwise().sum().transpose();
  const Eigen::VectorXcd rows = prod.rowwise().sum();
  const Eigen::VectorXd acol = a.colwise().norm().transpose(), bcol = b.colwise().norm().transpose();
  const Eigen::VectorXd arow = a.rowwise().norm(), brow = b.rowwise().norm();

  // roundoff: each inner product loses ~N eps, each power ~(k+l+2) entry
  // rounding errors of relative size eps (four ulps per entry allowed)
  const double ulps = (N + 8.0 * (k + l + 2)) * kEps;
  std::vector<double> mag(J + 1), noise(J + 1);
  double scale = 0;
  cplx sum = 0;
  t.partials.resize(J + 1);
  for (int j = 0; j <= J; ++j) {
    const cplx inc = cols[j] - rows[j];
    sum += inc;
    t.partials[j] = sum;
    mag[j] = std::abs(inc);
    const double s_j = acol[j] * bcol[j] + arow[j] * brow[j];
    noise[j] = ulps * s_j;
    scale += s_j;
  }
  t.value = sum;
  const double floor = ulps * scale;
  if (H_.complete) {
    t.envelope = floor;
    return t;
  }
  double envelope = std::max(mag[J], floor);
  if (J + 1 >= 12) {
    auto tail = tail_estimate(mag, noise, J, 6, floor);
    if (!tail && J + 1 >= 24)
      tail = tail_estimate(mag, noise, J, 12, floor);
    if (!tail)
      throw Error(ErrorKind::NoConvergence,
                  "partial sums of trace (k=" + std::to_string(k) + ", l=" + std::to_string(l) +
                      ") do not settle by J = " + std::to_string(J),
                  mag[J]);
    envelope = std::max(envelope, *tail);
  } else {
    // too few terms to fit a rate: assume increments decay like j^-2, as
    // for a disk, from the largest one in the second half
    double m = 0;
    for (int j = J / 2; j <= J; ++j)
      m = std::max(m, mag[j]);
    envelope = std::max(envelope, m * (J + 1));
  }
  t.envelope = envelope;
  return t;
}

TraceEstimate commutatorTrace(const HessenbergMatrix &H, int k, int l, int J, int margin) {
  return TraceEngine(H).trace(k, l, J, margin);
}

double CloudMoments::max_relative_envelope() const {
  double worst = 0;
  for (int k = 0; k <= degree; ++k)
    for (int l = 0; l <= degree; ++l) {
      const double mag = std::abs(entries(k, l));
      if (mag > 0)
        worst = std::max(worst, envelopes(k, l) / mag);
      else if (envelopes(k, l) > 0)
        worst = std::numeric_limits<double>::infinity();
    }
  return worst;
}

CloudMoments cloudMoments(const HessenbergMatrix &H, int d, int J, int margin) {
  if (d < 0)
    throw Error(ErrorKind::InvalidInput, "cloud moment degree must be >= 0");
  TraceEngine engine(H);
  const int n = d + 1;
  Eigen::MatrixXcd raw(n, n);
  Eigen::MatrixXd env(n, n);
  CloudMoments a;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      // a_kl = \int z^k conj(z)^l dA = pi / ((k+1)(l+1)) Tr[(S*)^{l+1}, S^{k+1}]
      const auto t = engine.trace(l, k, J, margin);
      const double scale = std::numbers::pi / ((k + 1.0) * (l + 1.0));
      raw(k, l) = scale * t.value;
      env(k, l) = scale * t.envelope;
      a.J = t.J;
      a.N = t.N;
      a.exact = t.exact;
    }
  a.degree = d;
  a.entries = (raw + raw.adjoint()) / 2.0;
  a.envelopes = (env + env.transpose()) / 2.0 + (raw - raw.adjoint()).cwiseAbs() / 2.0;
  for (int k = 0; k < n; ++k)
    a.entries(k, k) = a.entries(k, k).real();
  a.area = a.entries(0, 0).real();
  a.area_envelope = a.envelopes(0, 0);
  if (d >= 1 && a.area > std::max(10 * a.area_envelope, 1e-10))
    a.centroid = a.entries(1, 0) / a.area;
  return a;
}

ScalarEstimate area(const HessenbergMatrix &H, int J, int margin) {
  const auto t = commutatorTrace(H, 0, 0, J, margin);
  ScalarEstimate out;
  const auto &h = H.entries;
  double sum = 0;
  out.partials.resize(t.J + 1);
  for (int j = 0; j <= t.J; ++j) {
    // outer index j: column norm of S e_j minus row norm (S* e_j)
    sum += h.col(j).squaredNorm() - h.row(j).squaredNorm();
    out.partials[j] = std::numbers::pi * sum;
  }
  out.value = std::numbers::pi * sum;
  out.envelope = std::numbers::pi * t.envelope;
  return out;
}

ComplexEstimate centroidIntegral(const HessenbergMatrix &H, int J, int margin) {
  TraceEngine engine(H);
  const auto t00 = engine.trace(0, 0, J, margin);
  const double a = std::numbers::pi * t00.value.real();
  const double a_env = std::numbers::pi * t00.envelope;
  if (!(a > std::max(10 * a_env, 1e-10)))
    throw Error(ErrorKind::CentroidUndefined,
                "cloud area " + std::to_string(a) + " is below its threshold", a);
  const auto t01 = engine.trace(0, 1, J, margin);
  return {std::numbers::pi / 2 * t01.value, std::numbers::pi / 2 * t01.envelope};
}

cplx centroidSeries(const HessenbergMatrix &H, int J) {
  const auto &h = H.entries;
  const int N = H.size;
  J = std::min(J, N - 1);
  cplx sum = 0;
  for (int j = 0; j <= J; ++j)
    for (int k = 0; k < N; ++k)
      for (int l = 0; l <= std::min(k + 1, N - 1); ++l)
        sum += h(l, k) * (h(k, j) * std::conj(h(l, j)) - h(j, l) * std::conj(h(j, k)));
  return std::numbers::pi / 2 * sum;
}

PerturbationReport perturbationExperiment(const HessenbergMatrix &H, const Perturbation &p, int d,
                                          int J, int margin) {
  const auto tilde = perturb(H, p);
  TraceEngine base(H), pert(tilde);
  PerturbationReport report;
  report.perturbation_norm = (tilde.entries - H.entries).norm();
  report.pass = true;
  for (int k = 0; k <= d; ++k)
    for (int l = 0; l <= d; ++l) {
      PerturbationRow row;
      row.k = k;
      row.l = l;
      const auto t0 = base.trace(k, l, J, margin);
      row.base = t0.value;
      try {
        const auto t1 = pert.trace(k, l, J, margin);
        row.perturbed = t1.value;
        row.deviation = std::abs(t1.value - t0.value);
        row.budget = t0.envelope + t1.envelope;
        row.pass = row.deviation <= row.budget;
      } catch (const Error &e) {
        if (e.kind() != ErrorKind::NoConvergence)
          throw;
        row.error = e.what();
        row.pass = false;
      }
      report.pass = report.pass && row.pass;
      report.rows.push_back(std::move(row));
    }
  return report;
}

} // namespace cloudsep
