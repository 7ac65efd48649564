#pragma once

#include "cloudsep/measure.hpp"
#include "cloudsep/traces.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace cloudsep {

// F(w, z) = 1 + sum_{m,n<=d} b[m][n] w^{-(m+1)} conj(z)^{-(n+1)}.
struct ExpTransformSeries {
  int window = 0;
  Eigen::MatrixXcd b;
  /// Radius R with the cloud inside |z| <= R, estimated from the moments;
  /// the series is only evaluated for |w|, |z| > R.
  double radius = 0;
};

/// Coefficients of exp(-L) - 1 for L = (1/pi) sum a_kl u^{k+1} v^{l+1},
/// truncated to the (d+1) x (d+1) window.
ExpTransformSeries expSeries(const Eigen::MatrixXcd &a, int d);
ExpTransformSeries expSeries(const CloudMoments &a, int d);

/// max_k (a_kk (k+1) / a_00)^{1/(2k)}: exact for centered disks and an
/// upper-bound proxy otherwise.
double momentRadius(const Eigen::MatrixXcd &a);

/// Series route; throws OutsideDomainRequired unless |w|, |z| > radius.
cplx evalExp(const ExpTransformSeries &series, cplx w, cplx z);

/// Closed form for the disk |z - c| < r: 1 - r^2 / ((w - c) conj(z - c)).
cplx evalExpDisk(cplx center, double radius, cplx w, cplx z);

// Real polynomial sum_{i,j} coeffs(i, j) x^i y^j.
struct RealPoly2 {
  Eigen::MatrixXd coeffs;
  double operator()(double x, double y) const;
};

struct QuadratureDomainModel {
  int order = 0;
  std::vector<cplx> P; // p_0..p_{d-1}; the leading p_d = 1 is implicit
  Eigen::MatrixXcd Q;  // q[m][n], 0 <= m, n <= d, Q(w, conj z) = sum q_mn w^m conj(z)^n
  std::vector<cplx> nodes;
  RealPoly2 boundary; // Q(z, conj z) as a polynomial in (x, y)
  double residual = 0;
  double condition = 1; // condition number of the scaled least-squares matrix
};

/// Fits the order-d quadrature-domain model to the series. Needs
/// window >= 2d. Throws FitIllConditioned when the linear system is
/// singular or its scaled condition number exceeds 1e12.
QuadratureDomainModel padeFit(const ExpTransformSeries &series, int d);

/// Numerical rank of (-b): eigenvalues above rel * largest, capped at max_order.
int selectOrder(const ExpTransformSeries &series, int max_order, double rel = 0.05);

/// Points where the boundary polynomial changes sign between neighbouring
/// nodes of an nx x ny grid over the box, located by linear interpolation.
std::vector<cplx> boundaryPoints(const QuadratureDomainModel &model, double xmin, double xmax,
                                 double ymin, double ymax, int nx, int ny);

} // namespace cloudsep
