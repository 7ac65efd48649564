#include "cloudsep/io.hpp"

#include "cloudsep/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace cloudsep::io {
namespace {

[[noreturn]] void invalid(const std::string &what) { throw Error(ErrorKind::InvalidInput, what); }

double number(const json &j, const std::string &what) {
  if (!j.is_number())
    invalid(what + " must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x))
    invalid(what + " must be finite");
  return x;
}

const json &member(const json &j, const char *key, const std::string &what) {
  if (!j.is_object() || !j.contains(key))
    invalid(what + " is missing \"" + key + "\"");
  return j.at(key);
}

double optional_number(const json &j, const char *key, double fallback, const std::string &what) {
  return j.contains(key) ? number(j.at(key), what + "." + key) : fallback;
}

json matrix_json(const Eigen::MatrixXcd &m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back(toJson(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json real_matrix_json(const Eigen::MatrixXd &m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXcd square_matrix_from_json(const json &j, int n, const std::string &what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    invalid(what + " must have " + std::to_string(n) + " rows");
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n)
      invalid(what + " row " + std::to_string(r) + " must have " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c)
      m(r, c) = complexFromJson(j[r][c]);
  }
  return m;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> out;
  std::string_view rest(line);
  for (;;) {
    const auto pos = rest.find(',');
    out.push_back(trim(rest.substr(0, pos)));
    if (pos == std::string_view::npos)
      break;
    rest.remove_prefix(pos + 1);
  }
  return out;
}

double parse_double(const std::string &s, int line) {
  double x = 0;
  const auto *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x))
    invalid("line " + std::to_string(line) + ": '" + s + "' is not a finite number");
  return x;
}

} // namespace

std::string formatNumber(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

json toJson(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complexFromJson(const json &j) {
  if (!j.is_array() || j.size() != 2)
    invalid("complex numbers are encoded as [re, im]");
  return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

MeasureSpec specFromJson(const json &j) {
  if (!j.is_object())
    invalid("measure specification must be a JSON object");
  MeasureSpec spec;
  if (j.contains("shapes")) {
    const auto &shapes = j.at("shapes");
    if (!shapes.is_array())
      invalid("\"shapes\" must be an array");
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      const auto &s = shapes[i];
      const std::string what = "shapes[" + std::to_string(i) + "]";
      const auto &kindj = member(s, "kind", what);
      if (!kindj.is_string())
        invalid(what + ".kind must be a string");
      const auto kind = kindj.get<std::string>();
      UniformShape shape;
      shape.weight = optional_number(s, "weight", 1.0, what);
      if (kind == "disk") {
        shape.kind = Disk{complexFromJson(member(s, "center", what)),
                          number(member(s, "radius", what), what + ".radius")};
      } else if (kind == "ellipse") {
        Ellipse e;
        e.center = complexFromJson(member(s, "center", what));
        e.semi_major = number(member(s, "a", what), what + ".a");
        e.semi_minor = number(member(s, "b", what), what + ".b");
        e.angle = optional_number(s, "angle", 0.0, what);
        shape.kind = e;
      } else if (kind == "polygon") {
        const auto &v = member(s, "vertices", what);
        if (!v.is_array())
          invalid(what + ".vertices must be an array");
        Polygon p;
        for (const auto &z : v)
          p.vertices.push_back(complexFromJson(z));
        shape.kind = p;
      } else {
        invalid(what + ".kind '" + kind + "' is not disk, ellipse or polygon");
      }
      spec.shapes.push_back(std::move(shape));
    }
  }
  auto triples = [&](const char *key, auto &&push) {
    if (!j.contains(key))
      return;
    const auto &arr = j.at(key);
    if (!arr.is_array())
      invalid(std::string("\"") + key + "\" must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto &t = arr[i];
      const std::string what = std::string(key) + "[" + std::to_string(i) + "]";
      if (!t.is_array() || t.size() != 3)
        invalid(what + " must be [re, im, mass]");
      push(cplx(number(t[0], what), number(t[1], what)), number(t[2], what));
    }
  };
  triples("atoms", [&](cplx z, double m) { spec.atoms.push_back({z, m}); });
  triples("samples", [&](cplx z, double w) { spec.samples.push_back({z, w}); });
  for (const auto &[key, _] : j.items())
    if (key != "shapes" && key != "atoms" && key != "samples")
      invalid("unknown key \"" + key + "\" in measure specification");
  spec.validate();
  return spec;
}

json toJson(const MeasureSpec &spec) {
  json shapes = json::array();
  for (const auto &s : spec.shapes) {
    json o;
    std::visit(
        [&](const auto &k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Disk>) {
            o["kind"] = "disk";
            o["center"] = toJson(k.center);
            o["radius"] = k.radius;
          } else if constexpr (std::is_same_v<K, Ellipse>) {
            o["kind"] = "ellipse";
            o["center"] = toJson(k.center);
            o["a"] = k.semi_major;
            o["b"] = k.semi_minor;
            o["angle"] = k.angle;
          } else {
            o["kind"] = "polygon";
            json v = json::array();
            for (const auto &z : k.vertices)
              v.push_back(toJson(z));
            o["vertices"] = v;
          }
        },
        s.kind);
    o["weight"] = s.weight;
    shapes.push_back(std::move(o));
  }
  json atoms = json::array();
  for (const auto &a : spec.atoms)
    atoms.push_back(json::array({a.location.real(), a.location.imag(), a.mass}));
  json out;
  out["shapes"] = shapes;
  out["atoms"] = atoms;
  if (!spec.samples.empty()) {
    json samples = json::array();
    for (const auto &s : spec.samples)
      samples.push_back(json::array({s.location.real(), s.location.imag(), s.weight}));
    out["samples"] = samples;
  }
  return out;
}

ComplexMoments momentsFromJson(const json &j) {
  const auto &dj = member(j, "degree", "moments file");
  if (!dj.is_number_integer() || dj.get<long long>() < 0 || dj.get<long long>() > 4096)
    invalid("moments file \"degree\" must be an integer in [0, 4096]");
  const int d = dj.get<int>();
  ComplexMoments m{d, square_matrix_from_json(member(j, "entries", "moments file"), d + 1,
                                              "moments file entries")};
  const double scale = m.entries.cwiseAbs().maxCoeff();
  if ((m.entries - m.entries.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    invalid("moments file entries are not Hermitian (s[l][k] must equal conj(s[k][l]))");
  return m;
}

json toJson(const ComplexMoments &m) {
  json out;
  out["degree"] = m.degree;
  out["entries"] = matrix_json(m.entries);
  return out;
}

CloudMoments cloudMomentsFromJson(const json &j) {
  const auto m = momentsFromJson(j);
  CloudMoments a;
  a.degree = m.degree;
  a.entries = m.entries;
  const int n = m.degree + 1;
  a.envelopes = Eigen::MatrixXd::Zero(n, n);
  if (j.contains("envelopes")) {
    const auto &e = j.at("envelopes");
    if (!e.is_array() || static_cast<int>(e.size()) != n)
      invalid("cloud moments \"envelopes\" must be a square array matching the degree");
    for (int r = 0; r < n; ++r) {
      if (!e[r].is_array() || static_cast<int>(e[r].size()) != n)
        invalid("cloud moments \"envelopes\" row " + std::to_string(r) + " has the wrong length");
      for (int c = 0; c < n; ++c)
        a.envelopes(r, c) = number(e[r][c], "envelope");
    }
  }
  a.J = j.value("J", 0);
  a.N = j.value("N", 0);
  a.exact = j.value("exact", false);
  a.area = a.entries(0, 0).real();
  a.area_envelope = a.envelopes(0, 0);
  if (a.degree >= 1 && a.area > std::max(10 * a.area_envelope, 1e-10))
    a.centroid = a.entries(1, 0) / a.area;
  return a;
}

json toJson(const CloudMoments &a) {
  json out;
  out["degree"] = a.degree;
  out["entries"] = matrix_json(a.entries);
  out["envelopes"] = real_matrix_json(a.envelopes);
  out["area"] = a.area;
  out["area_envelope"] = a.area_envelope;
  out["centroid"] = a.centroid ? toJson(*a.centroid) : json(nullptr);
  out["J"] = a.J;
  out["N"] = a.N;
  out["exact"] = a.exact;
  return out;
}

json toJson(const TraceEstimate &t) {
  json o;
  o["k"] = t.k;
  o["l"] = t.l;
  o["value"] = toJson(t.value);
  o["envelope"] = t.envelope;
  o["exact"] = t.exact;
  return o;
}

json toJson(const Perturbation &p) {
  json o;
  if (const auto *fr = std::get_if<FiniteRankPerturbation>(&p)) {
    o["kind"] = "finite-rank";
    json entries = json::array();
    for (const auto &e : fr->entries)
      entries.push_back({{"row", e.row}, {"col", e.col}, {"value", toJson(e.value)}});
    o["entries"] = entries;
  } else {
    const auto &sr = std::get<ScaledRandomPerturbation>(p);
    o["kind"] = "scaled-random";
    o["norm"] = sr.norm;
    o["seed"] = sr.seed;
    o["decay"] = sr.decay;
  }
  return o;
}

json toJson(const HessenbergMatrix &h) {
  json o;
  o["size"] = h.size;
  o["source_degree"] = h.source_degree;
  o["complete"] = h.complete;
  o["bits"] = h.bits;
  o["entries"] = matrix_json(h.entries);
  json perts = json::array();
  for (const auto &p : h.perturbations)
    perts.push_back(toJson(p));
  o["perturbations"] = perts;
  return o;
}

json toJson(const QuadratureDomainModel &model) {
  json o;
  o["order"] = model.order;
  json p = json::array();
  for (const auto &c : model.P)
    p.push_back(toJson(c));
  o["P"] = p;
  o["Q"] = matrix_json(model.Q);
  json nodes = json::array();
  for (const auto &z : model.nodes)
    nodes.push_back(toJson(z));
  o["nodes"] = nodes;
  o["boundary"] = {{"coeffs", real_matrix_json(model.boundary.coeffs)}};
  o["residual"] = model.residual;
  o["condition"] = model.condition;
  return o;
}

json toJson(const PerturbationReport &report) {
  json rows = json::array();
  for (const auto &r : report.rows) {
    json o;
    o["k"] = r.k;
    o["l"] = r.l;
    o["base"] = toJson(r.base);
    o["perturbed"] = toJson(r.perturbed);
    o["deviation"] = r.deviation;
    o["budget"] = r.budget;
    o["pass"] = r.pass;
    if (!r.error.empty())
      o["error"] = r.error;
    rows.push_back(std::move(o));
  }
  json out;
  out["perturbation_norm"] = report.perturbation_norm;
  out["pass"] = report.pass;
  out["traces"] = rows;
  return out;
}

SampleCloud samplesFromCsv(std::istream &in) {
  std::string line;
  int lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      header = split_csv(trim(line));
      break;
    }
  }
  if (header.empty())
    invalid("sample CSV is empty");
  if (header.size() < 2 || header.size() > 3 || header[0] != "x" || header[1] != "y" ||
      (header.size() == 3 && header[2] != "weight"))
    invalid("sample CSV header must be 'x,y,weight' or 'x,y'");
  SampleCloud cloud;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty())
      continue;
    const auto f = split_csv(t);
    if (f.size() < 2 || f.size() > header.size())
      invalid("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
              " fields");
    Sample s;
    s.location = {parse_double(f[0], lineno), parse_double(f[1], lineno)};
    s.weight = f.size() == 3 && !f[2].empty() ? parse_double(f[2], lineno) : 1.0;
    if (!(s.weight > 0))
      invalid("line " + std::to_string(lineno) + ": weight must be positive");
    cloud.push_back(s);
  }
  if (cloud.empty())
    throw Error(ErrorKind::EmptyMeasure, "sample CSV has no samples");
  return cloud;
}

void writeSamplesCsv(std::ostream &out, const SampleCloud &cloud) {
  out << "x,y,weight\n";
  for (const auto &s : cloud)
    out << formatNumber(s.location.real()) << ',' << formatNumber(s.location.imag()) << ','
        << formatNumber(s.weight) << '\n';
}

void writeGridCsv(std::ostream &out, const ClassificationGrid &grid) {
  out << "x,y,label,lambda_low,lambda_high\n";
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const auto z = grid.point(ix, iy);
      const std::size_t c = static_cast<std::size_t>(iy) * grid.nx + ix;
      out << formatNumber(z.real()) << ',' << formatNumber(z.imag()) << ','
          << to_string(grid.labels[c]) << ',' << formatNumber(grid.lambda_low[c]) << ','
          << formatNumber(grid.lambda_high[c]) << '\n';
    }
}

void writeBoundaryCsv(std::ostream &out, const std::vector<cplx> &points) {
  out << "x,y\n";
  for (const auto &z : points)
    out << formatNumber(z.real()) << ',' << formatNumber(z.imag()) << '\n';
}

std::string readTextFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    invalid("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json readJsonFile(const std::filesystem::path &path) {
  const auto text = readTextFile(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    invalid("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void writeTextFile(const std::filesystem::path &path, const std::string &text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error(ErrorKind::InvalidInput, "cannot write '" + tmp.string() + "'");
    out << text;
    if (!out)
      throw Error(ErrorKind::InvalidInput, "failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

} // namespace cloudsep::io
