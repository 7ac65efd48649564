#pragma once

#include "cloudsep/hessenberg.hpp"
#include "cloudsep/measure.hpp"

#include <Eigen/Dense>

#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cloudsep {

inline constexpr int kDefaultMargin = 8;

// Truncated value of Tr[(S*)^{k+1}, S^{l+1}].
struct TraceEstimate {
  int k = 0;
  int l = 0;
  int J = 0; // last diagonal index summed
  int N = 0; // matrix size used
  cplx value;
  /// Estimated magnitude of the part of the trace beyond J plus roundoff.
  double envelope = 0;
  /// The matrix is the whole finite-rank operator: value is exact up to
  /// roundoff and the envelope is the roundoff bound alone.
  bool exact = false;
  std::vector<cplx> partials; // partial sums for j = 0..J
};

// Evaluates many traces against one matrix, caching its powers.
class TraceEngine {
public:
  explicit TraceEngine(const HessenbergMatrix &H);

  TraceEstimate trace(int k, int l, int J, int margin = kDefaultMargin) const;
  /// j-th diagonal term <S^{l+1} e_j, S^{k+1} e_j> - <(S*)^{k+1} e_j, (S*)^{l+1} e_j>.
  cplx term(int k, int l, int j) const;
  /// Largest J the size allows for (k, l) at this margin.
  int maxCutoff(int k, int l, int margin = kDefaultMargin) const;
  const HessenbergMatrix &matrix() const { return H_; }

private:
  const Eigen::MatrixXcd &power(int m) const;

  HessenbergMatrix H_;
  // powers_[m-1] = H^m; a deque keeps references stable as it grows
  mutable std::deque<Eigen::MatrixXcd> powers_;
};

TraceEstimate commutatorTrace(const HessenbergMatrix &H, int k, int l, int J,
                              int margin = kDefaultMargin);

// Moments a[k][l] = \int_Omega z^k conj(z)^l dA of the cloud.
struct CloudMoments {
  int degree = 0;
  Eigen::MatrixXcd entries;
  Eigen::MatrixXd envelopes;
  double area = 0;
  double area_envelope = 0;
  std::optional<cplx> centroid; // set when the area clears its threshold
  int J = 0;
  int N = 0;
  bool exact = false;

  ComplexMoments as_moments() const { return {degree, entries}; }
  double max_relative_envelope() const;
};

CloudMoments cloudMoments(const HessenbergMatrix &H, int d, int J, int margin = kDefaultMargin);

struct ScalarEstimate {
  double value = 0;
  double envelope = 0;
  std::vector<double> partials;
};

struct ComplexEstimate {
  cplx value;
  double envelope = 0;
};

/// pi * sum_{j<=J} (sum_n |h_nj|^2 - sum_k |h_jk|^2), summed j-outer.
ScalarEstimate area(const HessenbergMatrix &H, int J, int margin = kDefaultMargin);

/// \int_Omega z dA = (pi / 2) Tr[S*, S^2]; throws CentroidUndefined when the
/// area does not clear max(10 * envelope, 1e-10).
ComplexEstimate centroidIntegral(const HessenbergMatrix &H, int J, int margin = kDefaultMargin);

/// The printed center-of-mass expansion
/// (pi/2) sum_j sum_k sum_{l<=k+1} h_lk (h_kj conj(h_lj) - h_jl conj(h_jk)),
/// read as a sum over j <= J and all k, l of the truncated matrix. Reported
/// as a diagnostic next to centroidIntegral, never asserted.
cplx centroidSeries(const HessenbergMatrix &H, int J);

struct PerturbationRow {
  int k = 0;
  int l = 0;
  cplx base;
  cplx perturbed;
  double deviation = 0;
  double budget = 0; // sum of both envelopes
  bool pass = false;
  std::string error; // set when the perturbed trace did not converge
};

struct PerturbationReport {
  std::vector<PerturbationRow> rows;
  double perturbation_norm = 0; // Frobenius norm of E
  bool pass = false;
};

/// Compares every trace (k, l <= d) of H and H + E at the same cutoff.
PerturbationReport perturbationExperiment(const HessenbergMatrix &H, const Perturbation &p, int d,
                                          int J, int margin = kDefaultMargin);

} // namespace cloudsep
