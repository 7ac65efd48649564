#pragma once

#include "cloudsep/measure.hpp"
#include "cloudsep/orthopoly.hpp"
#include "cloudsep/precision.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <variant>
#include <vector>

namespace cloudsep {

struct FiniteRankPerturbation {
  struct Entry {
    int row = 0;
    int col = 0;
    cplx value;
  };
  std::vector<Entry> entries;
};

// E[n][k] = g_nk * decay^(n+k) with g_nk standard complex Gaussian, then
// rescaled so that ||E||_F = norm. decay < 1 keeps E trace class uniformly
// in the truncation size; decay = 1 gives an unstructured dense matrix.
struct ScaledRandomPerturbation {
  double norm = 0;
  std::uint64_t seed = 0;
  double decay = 0.9;
};

using Perturbation = std::variant<FiniteRankPerturbation, ScaledRandomPerturbation>;

struct HessenbergMatrix {
  int size = 0;
  Eigen::MatrixXcd entries; // h[n][k] = <z p_k, p_n>
  int source_degree = 0;
  /// True when the matrix is the whole operator (finite-rank measure with
  /// size == rank), so traces of commutators are exactly 0.
  bool complete = false;
  /// Perturbations applied on top of the moment-built matrix, in order.
  std::vector<Perturbation> perturbations;
  /// Mantissa bits used when the matrix was built from moments.
  unsigned bits = 53;

  cplx operator()(int n, int k) const { return entries(n, k); }
};

/// Leading N x N block of the basis recurrence. Needs N <= basis.rank - 1,
/// or N == rank when the basis spans the whole finite-rank space.
HessenbergMatrix buildHessenberg(const ComplexMoments &m, const OrthonormalBasis &basis, int N);

struct SpecHessenbergOptions {
  Precision precision;
  /// Mantissa bits beyond which the automatic precision search gives up.
  unsigned max_bits = 16384;
};

/// Hessenberg matrix of up to N x N straight from a measure specification:
/// moments, factorization and recurrence all run at the requested
/// precision (the automatic mode escalates until the factorization is
/// trustworthy). Finite-rank measures return their complete matrix when the
/// rank is at most N.
HessenbergMatrix hessenbergOfSpec(const MeasureSpec &spec, int N,
                                  const SpecHessenbergOptions &options = {});

/// Mantissa bits the automatic mode starts from for size N.
unsigned autoBits(const MeasureSpec &spec, int N);

/// Hessenberg matrix of a discrete measure by Arnoldi orthogonalization of
/// the Krylov vectors 1, z, z^2, ... in l2(weights), with one
/// re-orthogonalization pass. Returns (d+1) x (d+1). Throws RankDeficient
/// when the cloud has at most d distinct locations.
HessenbergMatrix arnoldiHessenberg(const SampleCloud &cloud, int d);

/// Same recurrence, but stops at the numerical rank instead of throwing and
/// marks the result complete when the rank is reached.
HessenbergMatrix arnoldiHessenbergUpTo(const SampleCloud &cloud, int d);

HessenbergMatrix perturb(const HessenbergMatrix &H, const Perturbation &p);

/// Dense perturbation matrix E of size N for p.
Eigen::MatrixXcd perturbationMatrix(const Perturbation &p, int N);

} // namespace cloudsep
