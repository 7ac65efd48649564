#include "cloudsep/svg.hpp"

#include "cloudsep/io.hpp"

#include <sstream>

namespace cloudsep {
namespace {

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

const char *fill(CellLabel label) {
  switch (label) {
  case CellLabel::interior: return "#4a7bd0";
  case CellLabel::exterior: return "#f4f4f4";
  case CellLabel::boundary: return "#b8c9e8";
  }
  return "#ffffff";
}

} // namespace

std::string renderSvg(const SvgScene &scene, int pixels) {
  const auto &b = scene.box;
  const double w = b.xmax - b.xmin, h = b.ymax - b.ymin;
  const double sx = pixels / w;
  const double height = h * sx;
  // y grows upwards in the plane, downwards in SVG
  auto px = [&](double x) { return io::formatNumber((x - b.xmin) * sx); };
  auto py = [&](double y) { return io::formatNumber((b.ymax - y) * sx); };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\""
      << io::formatNumber(height) << "\" viewBox=\"0 0 " << pixels << ' '
      << io::formatNumber(height) << "\">\n";
  if (!scene.title.empty())
    out << "<title>" << escape(scene.title) << "</title>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (const auto *g = scene.grid) {
    const double cw = g->nx > 1 ? (g->box.xmax - g->box.xmin) / (g->nx - 1) : w;
    const double ch = g->ny > 1 ? (g->box.ymax - g->box.ymin) / (g->ny - 1) : h;
    out << "<g shape-rendering=\"crispEdges\">\n";
    for (int iy = 0; iy < g->ny; ++iy)
      for (int ix = 0; ix < g->nx; ++ix) {
        const auto z = g->point(ix, iy);
        out << "<rect x=\"" << px(z.real() - cw / 2) << "\" y=\"" << py(z.imag() + ch / 2)
            << "\" width=\"" << io::formatNumber(cw * sx) << "\" height=\""
            << io::formatNumber(ch * sx) << "\" fill=\"" << fill(g->label(ix, iy)) << "\"/>\n";
      }
    out << "</g>\n";
  }
  out << "<g fill=\"#d03a2a\">\n";
  for (const auto &z : scene.boundary)
    out << "<circle cx=\"" << px(z.real()) << "\" cy=\"" << py(z.imag()) << "\" r=\"1.2\"/>\n";
  out << "</g>\n<g fill=\"none\" stroke=\"#111111\" stroke-width=\"1.5\">\n";
  for (const auto &z : scene.nodes) {
    out << "<path d=\"M " << px(z.real() - 0.03 * w) << ' ' << py(z.imag()) << " L "
        << px(z.real() + 0.03 * w) << ' ' << py(z.imag()) << " M " << px(z.real()) << ' '
        << py(z.imag() - 0.03 * w) << " L " << px(z.real()) << ' ' << py(z.imag() + 0.03 * w)
        << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

} // namespace cloudsep
