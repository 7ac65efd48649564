#pragma once

#include "cloudsep/measure.hpp"
#include "cloudsep/orthopoly.hpp"
#include "cloudsep/precision.hpp"
#include "cloudsep/traces.hpp"

#include <string>
#include <vector>

namespace cloudsep {

enum class CellLabel { interior, exterior, boundary };

std::string_view to_string(CellLabel label) noexcept;

struct Box {
  double xmin = -1.5, xmax = 1.5, ymin = -1.5, ymax = 1.5;
};

struct ClassifyOptions {
  double theta_in = 0.5;
  double theta_out = 0.1;
  /// Arithmetic and rank handling for the cloud-moment factorization.
  OrthoOptions ortho{Precision::automatic(), RankPolicy::detect, 0};
};

// Christoffel-function decay labels on the nodes of an nx x ny grid
// (endpoints included). Cell (ix, iy) is stored at iy * nx + ix.
struct ClassificationGrid {
  Box box;
  int nx = 0;
  int ny = 0;
  int n1 = 0;
  int n2 = 0;
  double theta_in = 0.5;
  double theta_out = 0.1;
  std::vector<CellLabel> labels;
  std::vector<double> lambda_low;  // Lambda_{n1}
  std::vector<double> lambda_high; // Lambda_{n2}
  std::vector<std::string> warnings;

  cplx point(int ix, int iy) const;
  CellLabel label(int ix, int iy) const { return labels[iy * nx + ix]; }
};

/// Label from the decay ratio Lambda_{n2} / Lambda_{n1}.
CellLabel classifyRatio(double lambda_low, double lambda_high, double theta_in, double theta_out);

ClassificationGrid classifyGrid(const ComplexMoments &a, const Box &box, int nx, int ny, int n1,
                                int n2, const ClassifyOptions &options = {});

/// Recovered cloud moments; adds a warning when a used moment's envelope
/// exceeds 1% of its Cauchy-Schwarz scale sqrt(a_kk a_ll).
ClassificationGrid classifyGrid(const CloudMoments &a, const Box &box, int nx, int ny, int n1,
                                int n2, const ClassifyOptions &options = {});

struct Components {
  int count = 0;
  std::vector<int> id;     // per cell: component index or -1
  std::vector<int> sizes;  // cells per component
};

/// 4-connected components of interior cells, numbered by first cell index.
Components connectedComponents(const ClassificationGrid &grid);

struct AtomMassEstimate {
  double value = 0;            // Lambda_n(z0)
  std::vector<double> sequence; // Lambda_0(z0)..Lambda_n(z0)
};

/// Upper bound mu({z0}) <= Lambda_n(z0) with the whole non-increasing sequence.
AtomMassEstimate estimateAtomMass(const ComplexMoments &m, cplx z0, int n,
                                  const OrthoOptions &options = {});

} // namespace cloudsep
