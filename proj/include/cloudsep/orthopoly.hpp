#pragma once

#include "cloudsep/measure.hpp"
#include "cloudsep/precision.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cloudsep {

// What to do with pivots that fall below the rank threshold.
//   detect: stop there; the number of accepted pivots is the rank.
//   full:   add a growing relative diagonal shift until the factorization
//           succeeds at full size (used for noisy moment data).
enum class RankPolicy { detect, full };

struct OrthoOptions {
  Precision precision;
  RankPolicy policy = RankPolicy::detect;
  /// Relative pivot threshold tau: a pivot with R[n][n]^2 <= tau * G[n][n]
  /// counts as zero. 0 selects the default for the chosen arithmetic.
  double rank_tolerance = 0;
};

// Orthonormal polynomials p_0..p_{rank-1} of a moment functional.
struct OrthonormalBasis {
  int rank = 0;
  int degree = 0; // degree of the moment data it was built from
  /// Row n holds c_{n,0..n}, so p_n(z) = sum_i c_{ni} z^i (lower triangular).
  Eigen::MatrixXcd coeffs;
  /// z p_k = sum_n recurrence(n, k) p_n for k < recurrence.cols(); this is
  /// the Hessenberg matrix of the data, rank x min(rank, degree).
  Eigen::MatrixXcd recurrence;
  /// Per-degree condition diagnostic R[n][n]^2 / G[n][n] (1 = no cancellation).
  std::vector<double> pivot_ratio;
  double tolerance = 0; // relative pivot threshold the factorization used
  double shift = 0;   // relative diagonal shift applied under RankPolicy::full
  unsigned bits = 53; // mantissa bits used by the factorization

  /// True when the rank is below the data size and the last accepted pivot
  /// stands at least `gap` above the threshold: a sharp drop, as for a
  /// finite atomic measure, rather than the gradual pivot decay of an
  /// ill-conditioned full-rank functional.
  bool sharp_rank_drop(double gap = 1e4) const;
  /// Leading coefficients gamma_n = c_{nn} > 0.
  Eigen::VectorXd gamma() const;
  /// Values p_0(z)..p_n(z) by the Hessenberg recurrence (stable in z).
  Eigen::VectorXcd evaluate(cplx z, int n) const;
};

OrthonormalBasis orthonormalize(const ComplexMoments &m, const OrthoOptions &options = {});

/// K_n(w, z) = sum_{j<=n} p_j(w) conj(p_j(z)).
cplx cdKernel(const OrthonormalBasis &basis, int n, cplx w, cplx z);

struct ChristoffelValue {
  int degree = 0;
  cplx point;
  double lambda = 0;
};

/// Lambda_n(z) = 1 / K_n(z, z).
ChristoffelValue christoffel(const OrthonormalBasis &basis, int n, cplx z);

/// Lambda_0(z)..Lambda_n(z) from one recurrence sweep.
std::vector<double> christoffelSequence(const OrthonormalBasis &basis, int n, cplx z);

} // namespace cloudsep
