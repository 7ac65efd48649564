#include "cloudsep/shape.hpp"

#include "cloudsep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

namespace cloudsep {

std::string_view to_string(CellLabel label) noexcept {
  switch (label) {
  case CellLabel::interior: return "interior";
  case CellLabel::exterior: return "exterior";
  case CellLabel::boundary: return "boundary";
  }
  return "boundary";
}

cplx ClassificationGrid::point(int ix, int iy) const {
  const double x = nx > 1 ? box.xmin + ix * (box.xmax - box.xmin) / (nx - 1) : box.xmin;
  const double y = ny > 1 ? box.ymin + iy * (box.ymax - box.ymin) / (ny - 1) : box.ymin;
  return {x, y};
}

CellLabel classifyRatio(double lambda_low, double lambda_high, double theta_in,
                        double theta_out) {
  const double ratio = lambda_high / lambda_low;
  if (ratio >= theta_in)
    return CellLabel::interior;
  if (ratio <= theta_out)
    return CellLabel::exterior;
  return CellLabel::boundary;
}

ClassificationGrid classifyGrid(const ComplexMoments &a, const Box &box, int nx, int ny, int n1,
                                int n2, const ClassifyOptions &options) {
  if (nx < 1 || ny < 1 || !(box.xmax >= box.xmin) || !(box.ymax >= box.ymin))
    throw Error(ErrorKind::InvalidInput, "classification grid needs a box and positive resolution");
  if (n1 < 0 || n1 >= n2)
    throw Error(ErrorKind::InvalidInput, "classification degrees need 0 <= n1 < n2");
  if (!(options.theta_out < options.theta_in))
    throw Error(ErrorKind::InvalidInput, "thresholds need theta_out < theta_in");
  if (a.degree < n2)
    throw Error(ErrorKind::DegreeOutOfRange, "moments of degree " + std::to_string(a.degree) +
                                                 " cannot support n2 = " + std::to_string(n2));
  const auto basis = orthonormalize(a.truncated(n2), options.ortho);
  if (basis.rank < n2 + 1)
    throw Error(ErrorKind::DegreeOutOfRange,
                "cloud-moment Gram matrix has numerical rank " + std::to_string(basis.rank) +
                    ", classification at n2 = " + std::to_string(n2) + " needs " +
                    std::to_string(n2 + 1),
                basis.rank);
  ClassificationGrid g;
  g.box = box;
  g.nx = nx;
  g.ny = ny;
  g.n1 = n1;
  g.n2 = n2;
  g.theta_in = options.theta_in;
  g.theta_out = options.theta_out;
  const std::size_t cells = static_cast<std::size_t>(nx) * ny;
  g.labels.resize(cells);
  g.lambda_low.resize(cells);
  g.lambda_high.resize(cells);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const auto seq = christoffelSequence(basis, n2, g.point(ix, iy));
      const std::size_t c = static_cast<std::size_t>(iy) * nx + ix;
      g.lambda_low[c] = seq[n1];
      g.lambda_high[c] = seq[n2];
      g.labels[c] = classifyRatio(seq[n1], seq[n2], g.theta_in, g.theta_out);
    }
  if (basis.shift > 0) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "Gram matrix regularized by a relative diagonal shift %.1e",
                  basis.shift);
    g.warnings.emplace_back(msg);
  }
  return g;
}

ClassificationGrid classifyGrid(const CloudMoments &a, const Box &box, int nx, int ny, int n1,
                                int n2, const ClassifyOptions &options) {
  auto g = classifyGrid(a.as_moments(), box, nx, ny, n1, n2, options);
  double worst = 0;
  for (int k = 0; k <= n2; ++k)
    for (int l = 0; l <= n2; ++l) {
      const double scale = std::sqrt(std::max(0.0, a.entries(k, k).real() * a.entries(l, l).real()));
      if (scale > 0)
        worst = std::max(worst, a.envelopes(k, l) / scale);
    }
  if (worst > 0.01) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "cloud-moment envelopes reach %.1f%% of the moment scale; labels near the "
                  "boundary are uncertain",
                  100 * worst);
    g.warnings.emplace_back(msg);
  }
  return g;
}

Components connectedComponents(const ClassificationGrid &grid) {
  Components out;
  const int nx = grid.nx, ny = grid.ny;
  out.id.assign(static_cast<std::size_t>(nx) * ny, -1);
  std::deque<int> queue;
  for (int start = 0; start < nx * ny; ++start) {
    if (grid.labels[start] != CellLabel::interior || out.id[start] >= 0)
      continue;
    const int comp = out.count++;
    out.sizes.push_back(0);
    out.id[start] = comp;
    queue.push_back(start);
    while (!queue.empty()) {
      const int c = queue.front();
      queue.pop_front();
      ++out.sizes[comp];
      const int ix = c % nx, iy = c / nx;
      const int nbr[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
      for (const auto &nb : nbr) {
        if (nb[0] < 0 || nb[0] >= nx || nb[1] < 0 || nb[1] >= ny)
          continue;
        const int n = nb[1] * nx + nb[0];
        if (grid.labels[n] == CellLabel::interior && out.id[n] < 0) {
          out.id[n] = comp;
          queue.push_back(n);
        }
      }
    }
  }
  return out;
}

AtomMassEstimate estimateAtomMass(const ComplexMoments &m, cplx z0, int n,
                                  const OrthoOptions &options) {
  if (n < 0 || n > m.degree)
    throw Error(ErrorKind::DegreeOutOfRange, "degree " + std::to_string(n) +
                                                 " exceeds the moment degree " +
                                                 std::to_string(m.degree));
  const auto basis = orthonormalize(m.truncated(n), options);
  if (n >= basis.rank)
    throw Error(ErrorKind::DegreeOutOfRange, "degree " + std::to_string(n) +
                                                 " not below basis rank " +
                                                 std::to_string(basis.rank));
  AtomMassEstimate e;
  e.sequence = christoffelSequence(basis, n, z0);
  e.value = e.sequence.back();
  return e;
}

} // namespace cloudsep
