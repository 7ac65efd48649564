#pragma once

#include "cloudsep/measure.hpp"
#include "cloudsep/shape.hpp"

#include <string>
#include <vector>

namespace cloudsep {

// Static picture of a reconstruction: grid labels as a raster, boundary
// points of the fitted polynomial and the fitted quadrature nodes.
struct SvgScene {
  Box box;
  const ClassificationGrid *grid = nullptr; // optional
  std::vector<cplx> boundary;
  std::vector<cplx> nodes;
  std::string title;
};

std::string renderSvg(const SvgScene &scene, int pixels = 480);

} // namespace cloudsep
