// cloudsep: separate the area cloud of a planar measure from its atoms
// using power moments only, then reconstruct the cloud's shape.

#include "cloudsep/errors.hpp"
#include "cloudsep/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>

namespace {

using namespace cloudsep;

// Parses "41" or "41x61".
std::pair<int, int> parse_grid(const std::string &text) {
  const auto x = text.find('x');
  try {
    std::size_t used = 0;
    if (x == std::string::npos) {
      const int n = std::stoi(text, &used);
      if (used == text.size())
        return {n, n};
    } else {
      const int nx = std::stoi(text.substr(0, x), &used);
      if (used == x) {
        const auto rest = text.substr(x + 1);
        const int ny = std::stoi(rest, &used);
        if (used == rest.size())
          return {nx, ny};
      }
    }
  } catch (const std::exception &) {
  }
  throw Error(ErrorKind::InvalidInput, "--grid expects N or NXxNY, got '" + text + "'");
}

Box parse_box(const std::string &text) {
  Box b;
  char c1 = 0, c2 = 0, c3 = 0;
  std::istringstream in(text);
  if (!(in >> b.xmin >> c1 >> b.xmax >> c2 >> b.ymin >> c3 >> b.ymax) || c1 != ',' ||
      c2 != ',' || c3 != ',' || !(in >> std::ws).eof())
    throw Error(ErrorKind::InvalidInput, "--box expects XMIN,XMAX,YMIN,YMAX, got '" + text + "'");
  return b;
}

std::pair<int, int> parse_degrees(const std::string &text) {
  if (text.find('x') == std::string::npos)
    throw Error(ErrorKind::InvalidInput, "--christoffel-degrees expects N1xN2, got '" + text + "'");
  return parse_grid(text);
}

struct Options {
  RunConfig config;
  std::string precision = "auto";
  std::string method = "both";
  std::string grid = "41";
  std::string box;
  std::string christoffel_degrees = "16x32";
  std::string scenario;
  int samples = 0;
  std::string perturbation = "none";
};

// Flags shared by every computing subcommand; each is overridable through
// CLOUDSEP_<NAME> in the environment.
void add_common(CLI::App *cmd, Options &o) {
  auto &c = o.config;
  cmd->add_option("input,--input", c.input, "spec JSON, moments JSON or samples CSV")
      ->envname("CLOUDSEP_INPUT");
  cmd->add_option("--degree,-d", c.degree, "cloud-moment degree d")
      ->envname("CLOUDSEP_DEGREE")
      ->capture_default_str();
  cmd->add_option("--out,-o", c.out, "output directory")
      ->envname("CLOUDSEP_OUT")
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "random seed")->envname("CLOUDSEP_SEED")->capture_default_str();
  cmd->add_option("--precision", o.precision, "auto, double or a mantissa bit count")
      ->envname("CLOUDSEP_PRECISION")
      ->capture_default_str();
}

void add_separation(CLI::App *cmd, Options &o) {
  auto &c = o.config;
  cmd->add_option("--cutoff,-J", c.cutoff, "diagonal cutoff J")
      ->envname("CLOUDSEP_CUTOFF")
      ->capture_default_str();
  cmd->add_option("--margin,-B", c.margin, "extra Hessenberg rows beyond the traces' reach")
      ->envname("CLOUDSEP_MARGIN")
      ->capture_default_str();
}

void add_reconstruction(CLI::App *cmd, Options &o) {
  auto &c = o.config;
  cmd->add_option("--method", o.method, "pade, christoffel or both")
      ->envname("CLOUDSEP_METHOD")
      ->capture_default_str();
  cmd->add_option("--grid", o.grid, "grid resolution N or NXxNY")
      ->envname("CLOUDSEP_GRID")
      ->capture_default_str();
  cmd->add_option("--box", o.box, "XMIN,XMAX,YMIN,YMAX (default: inferred from the moments)")
      ->envname("CLOUDSEP_BOX");
  cmd->add_option("--order", c.order, "quadrature-domain order (0 = select)")
      ->envname("CLOUDSEP_ORDER")
      ->capture_default_str();
  cmd->add_option("--christoffel-degrees", o.christoffel_degrees, "N1xN2")
      ->envname("CLOUDSEP_CHRISTOFFEL_DEGREES")
      ->capture_default_str();
  cmd->add_flag("--svg", c.svg, "also write reconstruct.svg")->envname("CLOUDSEP_SVG");
}

void finish(Options &o) {
  auto &c = o.config;
  c.precision = Precision::parse(o.precision);
  c.method = parseMethod(o.method);
  std::tie(c.grid_nx, c.grid_ny) = parse_grid(o.grid);
  if (!o.box.empty())
    c.box = parse_box(o.box);
  std::tie(c.n1, c.n2) = parse_degrees(o.christoffel_degrees);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Separate the area cloud of a planar measure from its atoms using power moments"};
  app.require_subcommand(1);
  Options o;

  auto *synth = app.add_subcommand("synth", "write a measure spec, its moments and optional samples");
  add_common(synth, o);
  synth->add_option("--scenario", o.scenario, "built-in measure")
      ->envname("CLOUDSEP_SCENARIO")
      ->check(CLI::IsMember(scenarioNames()));
  synth->add_option("--samples", o.samples, "number of samples to draw")
      ->envname("CLOUDSEP_SAMPLES")
      ->capture_default_str();

  auto *sep = app.add_subcommand("separate", "commutator traces, cloud moments, area and centroid");
  add_common(sep, o);
  add_separation(sep, o);

  auto *rec = app.add_subcommand("reconstruct", "shape of the cloud (Pade fit and/or Christoffel grid)");
  add_common(rec, o);
  add_separation(rec, o);
  add_reconstruction(rec, o);

  auto *per = app.add_subcommand("perturb", "trace invariance under a Hessenberg perturbation");
  add_common(per, o);
  add_separation(per, o);
  per->add_option("--perturbation", o.perturbation,
                  "none, bump:ROW,COL,RE[,IM][;...] or random:NORM[,DECAY]")
      ->envname("CLOUDSEP_PERTURBATION")
      ->capture_default_str();

  auto *rep = app.add_subcommand("report", "summarize the outputs in a directory");
  rep->add_option("--out,-o,dir", o.config.out, "output directory")
      ->envname("CLOUDSEP_OUT")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    finish(o);
    if (synth->parsed())
      return cmdSynth(o.config, o.scenario, o.samples, std::cout);
    if (sep->parsed())
      return cmdSeparate(o.config, std::cout);
    if (rec->parsed())
      return cmdReconstruct(o.config, std::cout);
    if (per->parsed())
      return cmdPerturb(o.config, o.perturbation, std::cout);
    return cmdReport(o.config, std::cout);
  } catch (const Error &e) {
    std::cerr << "cloudsep: " << e.what() << '\n';
    return exitCode(e);
  } catch (const std::exception &e) {
    std::cerr << "cloudsep: " << e.what() << '\n';
    return 1;
  }
}
