#include "cloudsep/exptransform.hpp"

#include "cloudsep/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cloudsep {
namespace {

constexpr double kMaxCondition = 1e12;

// Binomial coefficients C(n, k) for n <= nmax.
Eigen::MatrixXd binomials(int nmax) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(nmax + 1, nmax + 1);
  for (int n = 0; n <= nmax; ++n) {
    c(n, 0) = 1;
    for (int k = 1; k <= n; ++k)
      c(n, k) = c(n - 1, k - 1) + (k <= n - 1 ? c(n - 1, k) : 0.0);
  }
  return c;
}

// Coefficient of w^e1 conj(z)^e2 in F.
cplx f_coeff(const Eigen::MatrixXcd &b, int e1, int e2) {
  if (e1 == 0 && e2 == 0)
    return 1.0;
  if (e1 < 0 && e2 < 0) {
    const int m = -e1 - 1, n = -e2 - 1;
    if (m < b.rows() && n < b.cols())
      return b(m, n);
  }
  return 0.0;
}

} // namespace

double momentRadius(const Eigen::MatrixXcd &a) {
  const double a00 = a(0, 0).real();
  if (!(a00 > 0))
    return 0;
  double r = 0;
  for (int k = 1; k < a.rows(); ++k) {
    const double ratio = a(k, k).real() * (k + 1) / a00;
    if (ratio > 0)
      r = std::max(r, std::pow(ratio, 0.5 / k));
  }
  return r;
}

ExpTransformSeries expSeries(const Eigen::MatrixXcd &a, int d) {
  if (d < 0 || a.rows() < d + 1 || a.cols() != a.rows())
    throw Error(ErrorKind::InvalidInput, "cloud moments must be square of degree >= window");
  const int w = d + 2; // series indices 0..d+1 in each variable
  // L[i][j] coefficient of u^i v^j
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(w, w);
  for (int k = 0; k <= d; ++k)
    for (int l = 0; l <= d; ++l)
      L(k + 1, l + 1) = a(k, l) / std::numbers::pi;
  // F = exp(-L): d/du F = -(d/du L) F, i.e.
  // i F[i][.] = -sum_{s=1}^{i} s L[s][.] * F[i-s][.]   (convolution in v)
  Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(w, w);
  F(0, 0) = 1;
  for (int i = 1; i < w; ++i) {
    for (int s = 1; s <= i; ++s)
      for (int j = 0; j < w; ++j) {
        cplx acc = 0;
        for (int t = 0; t <= j; ++t)
          acc += L(s, t) * F(i - s, j - t);
        F(i, j) -= static_cast<double>(s) * acc;
      }
    F.row(i) /= static_cast<double>(i);
  }
  ExpTransformSeries out;
  out.window = d;
  out.b = F.bottomRightCorner(d + 1, d + 1);
  out.radius = momentRadius(a.topLeftCorner(d + 1, d + 1));
  return out;
}

ExpTransformSeries expSeries(const CloudMoments &a, int d) {
  if (a.degree < d)
    throw Error(ErrorKind::InvalidInput, "cloud moments of degree " + std::to_string(a.degree) +
                                             " cannot fill a window of " + std::to_string(d));
  return expSeries(a.entries, d);
}

cplx evalExp(const ExpTransformSeries &series, cplx w, cplx z) {
  if (!(std::abs(w) > series.radius) || !(std::abs(z) > series.radius))
    throw Error(ErrorKind::OutsideDomainRequired,
                "series converges only for |w|, |z| > " + std::to_string(series.radius),
                series.radius);
  const int n = series.window + 1;
  const cplx iw = 1.0 / w, iz = std::conj(1.0 / z);
  cplx sum = 1;
  cplx pw = iw;
  for (int m = 0; m < n; ++m) {
    cplx pz = iz;
    for (int k = 0; k < n; ++k) {
      sum += series.b(m, k) * pw * pz;
      pz *= iz;
    }
    pw *= iw;
  }
  return sum;
}

cplx evalExpDisk(cplx center, double radius, cplx w, cplx z) {
  if (!(std::abs(w - center) > radius) || !(std::abs(z - center) > radius))
    throw Error(ErrorKind::OutsideDomainRequired, "closed form holds outside the closed disk",
                radius);
  return 1.0 - radius * radius / ((w - center) * std::conj(z - center));
}

double RealPoly2::operator()(double x, double y) const {
  double sum = 0;
  double px = 1;
  for (int i = 0; i < coeffs.rows(); ++i) {
    double py = 1;
    for (int j = 0; j < coeffs.cols(); ++j) {
      sum += coeffs(i, j) * px * py;
      py *= y;
    }
    px *= x;
  }
  return sum;
}

QuadratureDomainModel padeFit(const ExpTransformSeries &series, int d) {
  const int W = series.window;
  if (d < 1)
    throw Error(ErrorKind::InvalidInput, "quadrature-domain order must be >= 1");
  if (W < 2 * d)
    throw Error(ErrorKind::DegreeOutOfRange, "order " + std::to_string(d) +
                                                 " needs a series window >= " +
                                                 std::to_string(2 * d));
  const auto &b = series.b;
  // sum_{i<d} p_i b[m+i][n] = -b[m+d][n] for m + d <= W, n <= W
  const int rows = (W - d + 1) * (W + 1);
  Eigen::MatrixXcd A(rows, d);
  Eigen::VectorXcd rhs(rows);
  int r = 0;
  for (int m = 0; m + d <= W; ++m)
    for (int n = 0; n <= W; ++n, ++r) {
      for (int i = 0; i < d; ++i)
        A(r, i) = b(m + i, n);
      rhs[r] = -b(m + d, n);
    }
  Eigen::VectorXd scale = A.colwise().norm().transpose();
  if (!(scale.minCoeff() > 0))
    throw Error(ErrorKind::FitIllConditioned, "series has an all-zero column: no cloud to fit",
                std::numeric_limits<double>::infinity());
  const Eigen::MatrixXcd As = A * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto &sv = svd.singularValues();
  const double cond = sv[d - 1] > 0 ? sv[0] / sv[d - 1] : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxCondition))
    throw Error(ErrorKind::FitIllConditioned,
                "node-polynomial system is ill-conditioned (condition " + std::to_string(cond) +
                    ")",
                cond);
  const Eigen::VectorXcd p = scale.cwiseInverse().asDiagonal() * svd.solve(rhs);

  QuadratureDomainModel model;
  model.order = d;
  model.condition = cond;
  model.P.assign(p.data(), p.data() + d);
  std::vector<cplx> pf(model.P);
  pf.push_back(1.0); // monic

  // Q = polynomial part of P(w) conj(P)(conj z) F(w, z)
  model.Q = Eigen::MatrixXcd::Zero(d + 1, d + 1);
  for (int al = 0; al <= d; ++al)
    for (int be = 0; be <= d; ++be) {
      cplx q = pf[al] * std::conj(pf[be]);
      for (int m = 0; al + m + 1 <= d; ++m)
        for (int n = 0; be + n + 1 <= d; ++n)
          q += pf[al + m + 1] * std::conj(pf[be + n + 1]) * b(m, n);
      model.Q(al, be) = q;
    }

  // residual: coefficients with a negative power that the model should cancel
  double sq = 0;
  int count = 0;
  for (int al = d - 1 - W; al <= d; ++al)
    for (int be = d - 1 - W; be <= d; ++be) {
      if (std::min(al, be) >= 0)
        continue;
      cplx g = 0;
      for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j)
          g += pf[i] * std::conj(pf[j]) * f_coeff(b, al - i, be - j);
      sq += std::norm(g);
      ++count;
    }
  model.residual = count ? std::sqrt(sq / count) : 0.0;

  // nodes: companion-matrix eigenvalues, one Newton step each
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i)
    comp(i, i - 1) = 1;
  for (int i = 0; i < d; ++i)
    comp(i, d - 1) = -pf[i];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(comp);
  for (int i = 0; i < d; ++i) {
    cplx z = eig.eigenvalues()[i];
    cplx val = 0, der = 0;
    for (int k = d; k >= 0; --k) {
      der = der * z + val;
      val = val * z + pf[k];
    }
    if (std::abs(der) > 0)
      z -= val / der;
    model.nodes.push_back(z);
  }
  std::sort(model.nodes.begin(), model.nodes.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });

  // boundary polynomial Q(z, conj z) in x, y
  const auto c = binomials(d);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(2 * d + 1, 2 * d + 1);
  const cplx I(0, 1);
  for (int al = 0; al <= d; ++al)
    for (int be = 0; be <= d; ++be)
      for (int s = 0; s <= al; ++s)
        for (int t = 0; t <= be; ++t)
          acc(al + be - s - t, s + t) +=
              model.Q(al, be) * c(al, s) * c(be, t) * std::pow(I, s) * std::pow(-I, t);
  model.boundary.coeffs = acc.real();
  return model;
}

int selectOrder(const ExpTransformSeries &series, int max_order, double rel) {
  const Eigen::MatrixXcd nb = -series.b;
  const Eigen::MatrixXcd herm = (nb + nb.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm, Eigen::EigenvaluesOnly);
  const auto &ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0))
    return 0;
  int rank = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] > rel * top)
      ++rank;
  return std::min(rank, max_order);
}

std::vector<cplx> boundaryPoints(const QuadratureDomainModel &model, double xmin, double xmax,
                                 double ymin, double ymax, int nx, int ny) {
  if (nx < 2 || ny < 2 || !(xmax > xmin) || !(ymax > ymin))
    throw Error(ErrorKind::InvalidInput, "boundary scan needs a non-empty box and >= 2x2 grid");
  const double dx = (xmax - xmin) / (nx - 1), dy = (ymax - ymin) / (ny - 1);
  Eigen::MatrixXd v(ny, nx);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      v(iy, ix) = model.boundary(xmin + ix * dx, ymin + iy * dy);
  std::vector<cplx> pts;
  auto crossing = [&](double x0, double y0, double f0, double x1, double y1, double f1) {
    if ((f0 < 0) == (f1 < 0))
      return;
    const double t = f0 / (f0 - f1);
    pts.emplace_back(x0 + t * (x1 - x0), y0 + t * (y1 - y0));
  };
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const double x = xmin + ix * dx, y = ymin + iy * dy;
      if (ix + 1 < nx)
        crossing(x, y, v(iy, ix), x + dx, y, v(iy, ix + 1));
      if (iy + 1 < ny)
        crossing(x, y, v(iy, ix), x, y + dy, v(iy + 1, ix));
    }
  return pts;
}

} // namespace cloudsep
