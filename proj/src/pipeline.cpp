#include "cloudsep/pipeline.hpp"

#include "cloudsep/errors.hpp"
#include "cloudsep/io.hpp"
#include "cloudsep/svg.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace cloudsep {
namespace fs = std::filesystem;
using io::json;

namespace {

[[noreturn]] void invalid(const std::string &what) { throw Error(ErrorKind::InvalidInput, what); }

std::string lower_extension(const std::string &path) {
  auto ext = fs::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::string dump(const json &j) { return j.dump(2) + "\n"; }

void write_files(const fs::path &dir, const std::vector<std::pair<std::string, std::string>> &files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    invalid("cannot create output directory '" + dir.string() + "': " + ec.message());
  for (const auto &[name, text] : files)
    io::writeTextFile(dir / name, text);
}

bool inside_shape(const UniformShape &s, cplx z) {
  return std::visit(
      [&](const auto &k) -> bool {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Disk>) {
          return std::abs(z - k.center) < k.radius;
        } else if constexpr (std::is_same_v<K, Ellipse>) {
          const cplx u = (z - k.center) * std::polar(1.0, -k.angle);
          const double x = u.real() / k.semi_major, y = u.imag() / k.semi_minor;
          return x * x + y * y < 1;
        } else {
          bool in = false;
          const auto &v = k.vertices;
          for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
            if ((v[i].imag() > z.imag()) != (v[j].imag() > z.imag()) &&
                z.real() < (v[j].real() - v[i].real()) * (z.imag() - v[i].imag()) /
                                   (v[j].imag() - v[i].imag()) +
                               v[i].real())
              in = !in;
          }
          return in;
        }
      },
      s.kind);
}

Box bounding_box(const UniformShape &s) {
  return std::visit(
      [](const auto &k) -> Box {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Disk>) {
          return {k.center.real() - k.radius, k.center.real() + k.radius,
                  k.center.imag() - k.radius, k.center.imag() + k.radius};
        } else if constexpr (std::is_same_v<K, Ellipse>) {
          return {k.center.real() - k.semi_major, k.center.real() + k.semi_major,
                  k.center.imag() - k.semi_major, k.center.imag() + k.semi_major};
        } else {
          Box b{k.vertices[0].real(), k.vertices[0].real(), k.vertices[0].imag(),
                k.vertices[0].imag()};
          for (const auto &v : k.vertices) {
            b.xmin = std::min(b.xmin, v.real());
            b.xmax = std::max(b.xmax, v.real());
            b.ymin = std::min(b.ymin, v.imag());
            b.ymax = std::max(b.ymax, v.imag());
          }
          return b;
        }
      },
      s.kind);
}

HessenbergMatrix hessenberg_for(const LoadedInput &input, int N, const RunConfig &config,
                                std::vector<std::string> &warnings) {
  switch (input.kind) {
  case InputKind::spec: {
    auto h = hessenbergOfSpec(input.spec, N, {config.precision});
    if (!h.complete && h.size < N)
      warnings.push_back("factorization kept only " + std::to_string(h.size) +
                         " orthonormal polynomials of the " + std::to_string(N) +
                         " requested; use more precision");
    return h;
  }
  case InputKind::samples:
    return arnoldiHessenbergUpTo(input.samples, N - 1);
  case InputKind::moments: {
    const auto basis = orthonormalize(input.moments, {config.precision, RankPolicy::detect, 0});
    const int available = static_cast<int>(basis.recurrence.cols());
    // a gradual pivot decay below the threshold is lost conditioning, not a
    // finite measure: the matrix is then only a truncation
    const bool whole = basis.sharp_rank_drop();
    if (basis.rank <= input.moments.degree && !whole)
      warnings.push_back("moment data resolve only " + std::to_string(basis.rank) + " of " +
                         std::to_string(input.moments.degree + 1) +
                         " orthonormal polynomials; use more accurate moments");
    return buildHessenberg(input.moments, basis, whole ? basis.rank : std::min(N, available));
  }
  case InputKind::cloud_moments:
    break;
  }
  invalid("cloud-moment files have no Hessenberg matrix; separate the original measure instead");
}

// Largest relative change of the last increments of the (0, 0) and (c, c)
// traces when H is cut back to half its margin. Rows of H are infinite, so
// row sums near the truncation edge miss mass; for banded matrices (a single
// disk) nothing changes, for several components the upper entries decay
// slowly and the margin has to grow.
double truncation_sensitivity(const HessenbergMatrix &H, int J, int c, int reach) {
  HessenbergMatrix cut = H;
  cut.size = reach + (H.size - reach) / 2;
  cut.entries = H.entries.topLeftCorner(cut.size, cut.size);
  const TraceEngine full(H), half(cut);
  const double norm = std::max(1.0, H.entries.colwise().norm().maxCoeff());
  double worst = 0;
  for (const int k : {0, c})
    for (int j = std::max(0, J - 4); j <= J; ++j) {
      const cplx a = full.term(k, k, j), b = half.term(k, k, j);
      const double noise = 1e-12 * std::pow(norm, 2 * k + 2);
      if (std::abs(a - b) > noise)
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), noise));
    }
  return worst;
}

} // namespace

Method parseMethod(const std::string &text) {
  if (text == "pade")
    return Method::pade;
  if (text == "christoffel")
    return Method::christoffel;
  if (text == "both")
    return Method::both;
  invalid("method must be pade, christoffel or both, got '" + text + "'");
}

std::string to_string(Method m) {
  switch (m) {
  case Method::pade: return "pade";
  case Method::christoffel: return "christoffel";
  case Method::both: return "both";
  }
  return "both";
}

std::string to_string(InputKind kind) {
  switch (kind) {
  case InputKind::spec: return "spec";
  case InputKind::samples: return "samples";
  case InputKind::moments: return "moments";
  case InputKind::cloud_moments: return "cloud-moments";
  }
  return "spec";
}

void RunConfig::validate() const {
  if (degree < 1)
    invalid("--degree must be >= 1");
  if (cutoff < 1)
    invalid("--cutoff must be >= 1");
  if (margin < 0)
    invalid("--margin must be >= 0");
  if (grid_nx < 2 || grid_ny < 2)
    invalid("--grid needs at least 2x2 nodes");
  if (n1 < 0 || n1 >= n2)
    invalid("Christoffel degrees need 0 <= n1 < n2");
  if (order < 0)
    invalid("--order must be >= 0");
  if (box && (!(box->xmax > box->xmin) || !(box->ymax > box->ymin)))
    invalid("--box must have xmin < xmax and ymin < ymax");
}

LoadedInput loadInput(const std::string &path) {
  if (path.empty())
    invalid("no input file given");
  LoadedInput in;
  const auto ext = lower_extension(path);
  if (ext == ".csv") {
    std::ifstream f(path);
    if (!f)
      invalid("cannot open '" + path + "'");
    in.kind = InputKind::samples;
    in.samples = io::samplesFromCsv(f);
    return in;
  }
  const auto j = io::readJsonFile(path);
  if (j.is_object() && j.contains("entries")) {
    if (j.contains("envelopes")) {
      in.kind = InputKind::cloud_moments;
      in.cloud = io::cloudMomentsFromJson(j);
    } else {
      in.kind = InputKind::moments;
      in.moments = io::momentsFromJson(j);
    }
    return in;
  }
  if (j.is_object() && (j.contains("shapes") || j.contains("atoms") || j.contains("samples"))) {
    in.kind = InputKind::spec;
    in.spec = io::specFromJson(j);
    return in;
  }
  invalid("'" + path + "' is neither a measure spec, a moments file nor a samples CSV");
}

Separation separate(const LoadedInput &input, const RunConfig &config, int cloud_degree) {
  config.validate();
  const int d = config.degree;
  cloud_degree = std::max(cloud_degree, d);
  Separation s;
  s.kind = input.kind;
  s.J_requested = config.cutoff;
  const int reach = config.cutoff + 2 * cloud_degree + 2;
  s.margin = config.margin;
  for (int attempt = 0;; ++attempt) {
    const int N = reach + s.margin;
    std::vector<std::string> notes;
    s.H = hessenberg_for(input, N, config, notes);
    if (s.H.complete || s.H.size < N) {
      s.warnings.insert(s.warnings.end(), notes.begin(), notes.end());
      break;
    }
    const double sensitivity = truncation_sensitivity(s.H, config.cutoff, cloud_degree, reach);
    if (sensitivity <= 0.05)
      break;
    if (attempt == 3) {
      s.warnings.push_back("trace increments near J still change by " +
                           std::to_string(static_cast<int>(100 * sensitivity)) +
                           "% with the matrix size at margin " + std::to_string(s.margin) +
                           "; envelopes may be optimistic");
      break;
    }
    s.margin = 2 * s.margin + 8;
  }
  int J = config.cutoff;
  if (!s.H.complete && s.H.size < reach + s.margin) {
    s.margin = config.margin;
    J = s.H.size - (2 * cloud_degree + 2 + config.margin);
    if (J < 0)
      throw Error(ErrorKind::DegreeOutOfRange,
                  "input supports a Hessenberg matrix of size " + std::to_string(s.H.size) +
                      ", too small for cloud moments of degree " + std::to_string(cloud_degree) +
                      " with margin " + std::to_string(config.margin));
    s.clamped = true;
    s.warnings.push_back("cutoff J clamped from " + std::to_string(config.cutoff) + " to " +
                         std::to_string(J) + " by the available matrix size " +
                         std::to_string(s.H.size));
  }
  TraceEngine engine(s.H);
  for (int k = 0; k <= d; ++k)
    for (int l = 0; l <= d; ++l)
      s.traces.push_back(engine.trace(k, l, J, s.margin));
  s.J = s.traces.front().J;
  s.cloud = cloudMoments(s.H, cloud_degree, J, s.margin);
  s.area = area(s.H, J, s.margin);
  // absent: the area is zero within a tight envelope; the centroid needs
  // the area resolved well above its envelope
  const bool resolved = s.area.value > std::max(10 * s.area.envelope, 1e-10);
  s.cloud_absent = s.area.envelope <= 1e-8 && !(s.area.value > std::max(s.area.envelope, 1e-10));
  if (!s.cloud_absent && !resolved)
    s.warnings.push_back("area " + io::formatNumber(s.area.value) + " is not resolved against its envelope " +
                         io::formatNumber(s.area.envelope) + "; no centroid");
  else if (!s.cloud_absent) {
    s.centroid_integral = centroidIntegral(s.H, J, s.margin);
    s.centroid_series = centroidSeries(s.H, J);
  }
  return s;
}

Box inferBox(const CloudMoments &cloud) {
  const double a00 = cloud.entries(0, 0).real();
  cplx c = cloud.centroid.value_or(0.0);
  double r = 1;
  if (a00 > 0 && cloud.degree >= 1) {
    const double second = cloud.entries(1, 1).real() / a00 - std::norm(c);
    if (second > 0)
      r = std::sqrt(2 * second);
  }
  const double h = 1.5 * r;
  return {c.real() - h, c.real() + h, c.imag() - h, c.imag() + h};
}

std::vector<std::string> scenarioNames() {
  return {"disk-atoms", "shifted-disk", "archipelago", "atoms", "ellipse", "polygon"};
}

MeasureSpec scenario(const std::string &name) {
  MeasureSpec s;
  if (name == "disk-atoms") {
    s.shapes.push_back({Disk{{0, 0}, 1.0}, 1.0});
    s.atoms = {{{2, 0}, 1.0}, {{-2, 1}, 0.5}, {{0, 3}, 2.0}};
  } else if (name == "shifted-disk") {
    s.shapes.push_back({Disk{{0.5, 0.25}, 0.75}, 1.0});
    s.atoms = {{{-1.5, 1.0}, 1.0}, {{1.8, -0.9}, 0.5}};
  } else if (name == "archipelago") {
    s.shapes.push_back({Disk{{-1, 0}, 0.5}, 1.0});
    s.shapes.push_back({Disk{{1, 0}, 0.5}, 1.0});
    s.atoms = {{{0, 1.5}, 1.0}, {{-0.5, -1.5}, 1.0}};
  } else if (name == "atoms") {
    s.atoms = {{{0.5, 0.2}, 1.0}, {{-0.7, 0.4}, 2.0}, {{0.1, -0.9}, 0.5}};
  } else if (name == "ellipse") {
    s.shapes.push_back({Ellipse{{0.2, 0}, 1.0, 0.6, 0.4}, 1.0});
    s.atoms = {{{2, 1}, 1.0}};
  } else if (name == "polygon") {
    s.shapes.push_back({Polygon{{{-0.8, -0.6}, {0.9, -0.5}, {0.7, 0.8}, {-0.6, 0.7}}}, 1.0});
    s.atoms = {{{-2, 0}, 1.0}};
  } else {
    std::string names;
    for (const auto &n : scenarioNames())
      names += (names.empty() ? "" : ", ") + n;
    invalid("unknown scenario '" + name + "' (known: " + names + ")");
  }
  return s;
}

SampleCloud drawSamples(const MeasureSpec &spec, int n, std::uint64_t seed) {
  spec.validate();
  if (n < 1)
    invalid("sample count must be positive");
  // component masses: shapes, then atoms, then samples
  std::vector<double> mass;
  for (const auto &s : spec.shapes)
    mass.push_back(s.weight * shape_area(s));
  for (const auto &a : spec.atoms)
    mass.push_back(a.mass);
  for (const auto &p : spec.samples)
    mass.push_back(p.weight);
  const double total = spec.total_mass();
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(mass.begin(), mass.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SampleCloud cloud;
  cloud.reserve(n);
  const std::size_t nshapes = spec.shapes.size(), natoms = spec.atoms.size();
  for (int i = 0; i < n; ++i) {
    const std::size_t c = pick(rng);
    cplx z;
    if (c < nshapes) {
      const auto &shape = spec.shapes[c];
      const Box b = bounding_box(shape);
      do {
        z = {b.xmin + (b.xmax - b.xmin) * unit(rng), b.ymin + (b.ymax - b.ymin) * unit(rng)};
      } while (!inside_shape(shape, z));
    } else if (c < nshapes + natoms) {
      z = spec.atoms[c - nshapes].location;
    } else {
      z = spec.samples[c - nshapes - natoms].location;
    }
    cloud.push_back({z, total / n});
  }
  return cloud;
}

Perturbation parsePerturbation(const std::string &text, std::uint64_t seed) {
  if (text == "none" || text.empty())
    return FiniteRankPerturbation{};
  auto numbers = [&](const std::string &body) {
    std::vector<double> v;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double x = 0;
      try {
        x = std::stod(item, &used);
      } catch (const std::exception &) {
        invalid("perturbation '" + text + "' has a malformed number '" + item + "'");
      }
      if (used != item.size() || !std::isfinite(x))
        invalid("perturbation '" + text + "' has a malformed number '" + item + "'");
      v.push_back(x);
    }
    return v;
  };
  if (text.rfind("bump:", 0) == 0) {
    FiniteRankPerturbation fr;
    std::stringstream ss(text.substr(5));
    std::string entry;
    while (std::getline(ss, entry, ';')) {
      const auto v = numbers(entry);
      if (v.size() < 3 || v.size() > 4 || v[0] < 0 || v[1] < 0 || v[0] != std::floor(v[0]) ||
          v[1] != std::floor(v[1]))
        invalid("bump entries are ROW,COL,RE[,IM] with non-negative integer indices");
      fr.entries.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]),
                            cplx(v[2], v.size() == 4 ? v[3] : 0.0)});
    }
    if (fr.entries.empty())
      invalid("bump perturbation has no entries");
    return fr;
  }
  if (text.rfind("random:", 0) == 0) {
    const auto v = numbers(text.substr(7));
    if (v.empty() || v.size() > 2 || !(v[0] >= 0))
      invalid("random perturbation is random:NORM[,DECAY] with NORM >= 0");
    ScaledRandomPerturbation sr{v[0], seed, v.size() == 2 ? v[1] : 0.9};
    if (!(sr.decay > 0) || sr.decay > 1)
      invalid("random perturbation decay must lie in (0, 1]");
    return sr;
  }
  invalid("perturbation must be none, bump:ROW,COL,RE[,IM] or random:NORM[,DECAY]");
}

namespace {

json separation_traces_json(const Separation &s) {
  json traces = json::array();
  for (const auto &t : s.traces)
    traces.push_back(io::toJson(t));
  json o;
  o["traces"] = traces;
  o["area"] = s.area.value;
  o["area_envelope"] = s.area.envelope;
  if (s.centroid_integral && s.area.value > 0) {
    o["centroid"] = io::toJson(s.centroid_integral->value / s.area.value);
    o["centroid_envelope"] = s.centroid_integral->envelope / s.area.value;
  } else {
    o["centroid"] = nullptr;
  }
  o["J"] = s.J;
  o["N"] = s.H.size;
  o["exact"] = s.H.complete;
  return o;
}

json separation_summary_json(const Separation &s, const RunConfig &config) {
  json o;
  o["input"] = config.input;
  o["input_kind"] = to_string(s.kind);
  o["degree"] = config.degree;
  o["J_requested"] = s.J_requested;
  o["J"] = s.J;
  o["J_clamped"] = s.clamped;
  o["N"] = s.H.size;
  o["margin_requested"] = config.margin;
  o["margin"] = s.margin;
  o["precision"] = config.precision.to_string();
  o["precision_bits"] = s.H.bits;
  o["exact"] = s.H.complete;
  o["cloud_absent"] = s.cloud_absent;
  o["area"] = {{"value", s.area.value}, {"envelope", s.area.envelope}};
  if (s.centroid_integral) {
    o["centroid_integral"] = {{"value", io::toJson(s.centroid_integral->value)},
                              {"envelope", s.centroid_integral->envelope}};
    o["centroid"] = {{"value", io::toJson(s.centroid_integral->value / s.area.value)},
                     {"envelope", s.centroid_integral->envelope / s.area.value}};
    // the printed expansion, reported next to the trace route for comparison
    o["centroid_series_diagnostic"] = {
        {"value", io::toJson(*s.centroid_series)},
        {"difference_from_trace", std::abs(*s.centroid_series - s.centroid_integral->value)}};
  } else {
    o["centroid"] = nullptr;
  }
  o["warnings"] = s.warnings;
  return o;
}

// Largest n <= cap such that every envelope in the leading (n+1) block
// stays below `rel` of the Cauchy-Schwarz scale sqrt(a_kk a_ll).
int reliable_degree(const CloudMoments &c, int cap, double rel) {
  for (int n = 0; n <= cap; ++n)
    for (int k = 0; k <= n; ++k) {
      const double scale =
          std::sqrt(std::max(0.0, c.entries(k, k).real() * c.entries(n, n).real()));
      if (!(c.envelopes(k, n) <= rel * scale) || !(c.envelopes(n, k) <= rel * scale))
        return n - 1;
    }
  return cap;
}

CloudMoments truncate_cloud(const CloudMoments &c, int d) {
  CloudMoments t = c;
  t.degree = d;
  t.entries = c.entries.topLeftCorner(d + 1, d + 1);
  t.envelopes = c.envelopes.topLeftCorner(d + 1, d + 1);
  return t;
}

} // namespace

int cmdSynth(const RunConfig &config, const std::string &scenario_name, int samples,
             std::ostream &log) {
  MeasureSpec spec;
  if (!scenario_name.empty()) {
    if (!config.input.empty())
      invalid("give either --scenario or an input spec, not both");
    spec = scenario(scenario_name);
  } else {
    const auto in = loadInput(config.input);
    if (in.kind != InputKind::spec)
      invalid("synth needs a measure specification");
    spec = in.spec;
  }
  if (config.degree < 0)
    invalid("--degree must be >= 0");
  const auto m = moments_of_spec(spec, config.degree);
  std::vector<std::pair<std::string, std::string>> files = {{"spec.json", dump(io::toJson(spec))},
                                                            {"moments.json", dump(io::toJson(m))}};
  if (samples > 0) {
    std::ostringstream csv;
    io::writeSamplesCsv(csv, drawSamples(spec, samples, config.seed));
    files.emplace_back("samples.csv", csv.str());
  }
  write_files(config.out, files);
  log << "wrote";
  for (const auto &f : files)
    log << ' ' << (fs::path(config.out) / f.first).string();
  log << '\n';
  return 0;
}

int cmdSeparate(const RunConfig &config, std::ostream &log) {
  config.validate();
  const auto in = loadInput(config.input);
  const auto s = separate(in, config, config.degree);
  write_files(config.out, {{"traces.json", dump(separation_traces_json(s))},
                           {"cloud_moments.json", dump(io::toJson(s.cloud))},
                           {"summary.json", dump(separation_summary_json(s, config))}});
  log << "area " << io::formatNumber(s.area.value) << " +- " << io::formatNumber(s.area.envelope);
  if (s.cloud_absent)
    log << " (cloud absent)";
  log << "; J = " << s.J << ", N = " << s.H.size << '\n';
  for (const auto &w : s.warnings)
    log << "warning: " << w << '\n';
  return 0;
}

int cmdReconstruct(const RunConfig &config, std::ostream &log) {
  config.validate();
  const auto in = loadInput(config.input);
  const bool want_pade = config.method != Method::christoffel;
  const bool want_christoffel = config.method != Method::pade;
  CloudMoments cloud;
  json source;
  std::vector<std::pair<std::string, std::string>> files;
  if (in.kind == InputKind::cloud_moments) {
    cloud = in.cloud;
    source = {{"input_kind", to_string(in.kind)}, {"degree", cloud.degree}};
  } else {
    const auto s = separate(in, config, want_christoffel ? config.n2 : config.degree);
    cloud = s.cloud;
    source = separation_summary_json(s, config);
    files.emplace_back("traces.json", dump(separation_traces_json(s)));
    files.emplace_back("cloud_moments.json", dump(io::toJson(truncate_cloud(cloud, config.degree))));
  }
  const Box box = config.box.value_or(inferBox(cloud));
  json summary;
  summary["method"] = to_string(config.method);
  summary["box"] = {box.xmin, box.xmax, box.ymin, box.ymax};
  summary["source"] = source;

  std::vector<std::string> reconstruct_warnings;
  std::optional<QuadratureDomainModel> model;
  std::vector<cplx> boundary;
  if (want_pade) {
    const int window = std::min(config.degree, cloud.degree);
    const auto series = expSeries(cloud, window);
    const int selected = selectOrder(series, std::max(1, window / 2));
    const int order = config.order > 0 ? config.order : std::max(1, selected);
    try {
      model = padeFit(series, order);
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::FitIllConditioned)
        log << "pade fit failed: order " << order << ", condition "
            << io::formatNumber(e.detail()) << ", b[0][0] = " << io::formatNumber(series.b(0, 0).real())
            << '\n';
      throw;
    }
    const int fine = 4 * (config.grid_nx - 1) + 1;
    boundary = boundaryPoints(*model, box.xmin, box.xmax, box.ymin, box.ymax, fine,
                              4 * (config.grid_ny - 1) + 1);
    files.emplace_back("model.json", dump(io::toJson(*model)));
    std::ostringstream csv;
    io::writeBoundaryCsv(csv, boundary);
    files.emplace_back("boundary.csv", csv.str());
    json nodes = json::array();
    for (const auto &z : model->nodes)
      nodes.push_back(io::toJson(z));
    summary["pade"] = {{"order", order},
                       {"selected_order", selected},
                       {"nodes", nodes},
                       {"residual", model->residual},
                       {"condition", model->condition},
                       {"boundary_points", boundary.size()}};
    log << "pade: order " << order << ", residual " << io::formatNumber(model->residual) << '\n';
  }
  std::optional<ClassificationGrid> grid;
  if (want_christoffel) {
    const int usable = reliable_degree(cloud, std::min(config.n2, cloud.degree), 0.25);
    if (usable < 2)
      throw Error(ErrorKind::DegreeOutOfRange,
                  "cloud moments are unreliable beyond degree " + std::to_string(usable) +
                      "; Christoffel classification needs at least degree 2");
    const int n2 = usable;
    const int n1 = n2 < config.n2 ? n2 / 2 : config.n1;
    if (n2 < config.n2)
      reconstruct_warnings.push_back(
          "Christoffel degrees lowered from (" + std::to_string(config.n1) + ", " +
          std::to_string(config.n2) + ") to (" + std::to_string(n1) + ", " + std::to_string(n2) +
          "): cloud-moment envelopes exceed 25% of the moment scale beyond degree " +
          std::to_string(n2));
    grid = classifyGrid(cloud, box, config.grid_nx, config.grid_ny, n1, n2);
    const auto comps = connectedComponents(*grid);
    std::ostringstream csv;
    io::writeGridCsv(csv, *grid);
    files.emplace_back("grid.csv", csv.str());
    summary["christoffel"] = {{"n1", n1},
                              {"n2", n2},
                              {"theta_in", grid->theta_in},
                              {"theta_out", grid->theta_out},
                              {"resolution", {config.grid_nx, config.grid_ny}},
                              {"components", comps.count},
                              {"component_sizes", comps.sizes},
                              {"warnings", grid->warnings}};
    for (const auto &w : grid->warnings)
      reconstruct_warnings.push_back(w);
    log << "christoffel: degrees (" << n1 << ", " << n2 << "), " << comps.count
        << " interior component(s)\n";
  }
  summary["warnings"] = reconstruct_warnings;
  for (const auto &w : reconstruct_warnings)
    log << "warning: " << w << '\n';
  if (config.svg) {
    SvgScene scene;
    scene.box = box;
    scene.grid = grid ? &*grid : nullptr;
    scene.boundary = boundary;
    if (model)
      scene.nodes = model->nodes;
    scene.title = "cloudsep reconstruction (" + to_string(config.method) + ")";
    files.emplace_back("reconstruct.svg", renderSvg(scene));
  }
  files.emplace_back("reconstruct.json", dump(summary));
  write_files(config.out, files);
  return 0;
}

int cmdPerturb(const RunConfig &config, const std::string &perturbation, std::ostream &log) {
  config.validate();
  const auto in = loadInput(config.input);
  const auto p = parsePerturbation(perturbation, config.seed);
  const auto s = separate(in, config, config.degree);
  const auto report = perturbationExperiment(s.H, p, config.degree, s.J, config.margin);
  auto j = io::toJson(report);
  j["perturbation"] = io::toJson(p);
  j["J"] = s.J;
  j["N"] = s.H.size;
  j["degree"] = config.degree;
  write_files(config.out, {{"perturb.json", dump(j)}});
  int failed = 0;
  for (const auto &r : report.rows)
    failed += r.pass ? 0 : 1;
  log << "perturbation norm " << io::formatNumber(report.perturbation_norm) << ": "
      << (report.pass ? "pass" : "fail") << " (" << failed << " of " << report.rows.size()
      << " traces outside their envelopes)\n";
  return 0;
}

int cmdReport(const RunConfig &config, std::ostream &out) {
  const fs::path dir(config.out);
  bool any = false;
  if (fs::exists(dir / "summary.json")) {
    any = true;
    const auto s = io::readJsonFile(dir / "summary.json");
    out << "separation (" << s.value("input_kind", std::string("?")) << " input, J = "
        << s.value("J", 0) << ", N = " << s.value("N", 0) << ")\n";
    out << "  area      " << io::formatNumber(s["area"]["value"].get<double>()) << " +- "
        << io::formatNumber(s["area"]["envelope"].get<double>()) << '\n';
    if (s.contains("centroid") && !s["centroid"].is_null())
      out << "  centroid  (" << io::formatNumber(s["centroid"]["value"][0].get<double>()) << ", "
          << io::formatNumber(s["centroid"]["value"][1].get<double>()) << ") +- "
          << io::formatNumber(s["centroid"]["envelope"].get<double>()) << '\n';
    if (s.value("cloud_absent", false))
      out << "  cloud absent\n";
    for (const auto &w : s["warnings"])
      out << "  warning: " << w.get<std::string>() << '\n';
  }
  if (fs::exists(dir / "reconstruct.json")) {
    any = true;
    const auto r = io::readJsonFile(dir / "reconstruct.json");
    if (r.contains("pade")) {
      const auto &p = r["pade"];
      out << "pade model (order " << p["order"].get<int>() << ", residual "
          << io::formatNumber(p["residual"].get<double>()) << ")\n";
      for (const auto &z : p["nodes"])
        out << "  node (" << io::formatNumber(z[0].get<double>()) << ", "
            << io::formatNumber(z[1].get<double>()) << ")\n";
    }
    if (r.contains("christoffel")) {
      const auto &c = r["christoffel"];
      out << "christoffel grid (degrees " << c["n1"].get<int>() << ", " << c["n2"].get<int>()
          << "): " << c["components"].get<int>() << " interior component(s)\n";
    }
  }
  if (fs::exists(dir / "perturb.json")) {
    any = true;
    const auto p = io::readJsonFile(dir / "perturb.json");
    int failed = 0;
    for (const auto &t : p["traces"])
      failed += t["pass"].get<bool>() ? 0 : 1;
    out << "perturbation (norm " << io::formatNumber(p["perturbation_norm"].get<double>())
        << "): " << (p["pass"].get<bool>() ? "pass" : "fail") << ", " << failed
        << " trace(s) outside envelopes\n";
  }
  if (!any)
    invalid("no cloudsep outputs in '" + dir.string() + "'");
  return 0;
}

int exitCode(const Error &e) {
  switch (e.kind()) {
  case ErrorKind::NoConvergence: return 3;
  case ErrorKind::FitIllConditioned: return 4;
  case ErrorKind::InvalidInput:
  case ErrorKind::EmptyMeasure:
  case ErrorKind::QuadratureFailure:
  case ErrorKind::NotAMomentMatrix:
  case ErrorKind::RankDeficient:
  case ErrorKind::DegreeOutOfRange: return 2;
  default: return 1;
  }
}

} // namespace cloudsep
