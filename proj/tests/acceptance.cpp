// Acceptance scenarios A1-A8. Prints one PASS/FAIL line per scenario and
// exits with status 1 when any of them fails. Arguments such as "A3" select
// scenarios; without arguments all of them run.

#include "cloudsep/errors.hpp"
#include "cloudsep/exptransform.hpp"
#include "cloudsep/hessenberg.hpp"
#include "cloudsep/orthopoly.hpp"
#include "cloudsep/pipeline.hpp"
#include "cloudsep/shape.hpp"
#include "cloudsep/traces.hpp"

#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cloudsep;
using std::numbers::pi;

namespace {

// Collects the failed checks of one scenario and a short summary of values.
class Verdict {
public:
  void check(bool ok, const std::string &what) {
    if (!ok)
      failures_.push_back(what);
  }
  template <class T> void note(const std::string &name, const T &value) {
    std::ostringstream s;
    s << std::setprecision(6) << name << '=' << value;
    notes_.push_back(s.str());
  }
  bool pass() const { return failures_.empty(); }
  std::string text() const {
    std::string out;
    for (const auto &n : notes_)
      out += (out.empty() ? "" : " ") + n;
    for (const auto &f : failures_)
      out += (out.empty() ? "" : "; ") + std::string("failed: ") + f;
    return out;
  }

private:
  std::vector<std::string> notes_;
  std::vector<std::string> failures_;
};

std::string complex_text(cplx z) {
  std::ostringstream s;
  s << std::setprecision(6) << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << 'i';
  return s.str();
}

LoadedInput spec_input(const MeasureSpec &spec) {
  LoadedInput in;
  in.kind = InputKind::spec;
  in.spec = spec;
  return in;
}

RunConfig defaults() {
  RunConfig c;
  c.degree = 6;
  c.cutoff = 200;
  return c;
}

// The A1 measure is shared by A1, A2, A3 and A5.
const Separation &a1_separation() {
  static const Separation s = separate(spec_input(scenario("disk-atoms")), defaults(), 6);
  return s;
}

MeasureSpec cloud_only(MeasureSpec s) {
  s.atoms.clear();
  s.samples.clear();
  return s;
}

double min_eigenvalue(const Eigen::MatrixXcd &m) {
  const Eigen::MatrixXcd h = (m + m.adjoint()) / 2.0;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

double max_abs_eigenvalue(const Eigen::MatrixXcd &m) {
  const Eigen::MatrixXcd h = (m + m.adjoint()) / 2.0;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

Verdict a1() {
  Verdict v;
  const auto &s = a1_separation();
  const double rel = std::abs(s.area.value - pi) / pi;
  v.note("area", s.area.value);
  v.note("envelope", s.area.envelope);
  v.note("rel_err", rel);
  v.check(rel <= 0.02, "area within 2% of pi");
  return v;
}

Verdict a2() {
  Verdict v;
  const auto &a = a1_separation().cloud;
  double worst = 0;
  int covered = 0, entries = 0;
  for (int k = 0; k <= 4; ++k)
    for (int l = 0; l <= 4; ++l) {
      const cplx expected = k == l ? pi / (k + 1) : 0.0;
      const double err = std::abs(a.entries(k, l) - expected);
      worst = std::max(worst, err);
      covered += a.envelopes(k, l) >= err;
      ++entries;
    }
  v.note("max_err", worst);
  v.note("envelope_coverage", double(covered) / entries);
  v.check(worst <= 0.05, "|a[k][l] - pi/(k+1) delta| <= 0.05 for k, l <= 4");
  v.check(covered >= 0.9 * entries, "envelopes cover >= 90% of the errors");
  return v;
}

Verdict a3() {
  Verdict v;
  const auto &a = a1_separation().cloud;
  const auto series = expSeries(a, 4);
  double b00 = std::abs(series.b(0, 0) + 1.0), others = 0;
  for (int m = 0; m < series.b.rows(); ++m)
    for (int n = 0; n < series.b.cols(); ++n)
      if (m || n)
        others = std::max(others, std::abs(series.b(m, n)));
  v.note("|b00+1|", b00);
  v.note("max|b_mn|", others);
  v.check(b00 <= 0.02, "|b[0][0] + 1| <= 0.02");
  v.check(others <= 0.02, "|b[m][n]| <= 0.02 otherwise");

  const auto model = padeFit(series, 1);
  const cplx node = model.nodes.at(0);
  // proportional to z conj(z) - 1: normalize by q11 and compare
  Eigen::MatrixXcd target = Eigen::MatrixXcd::Zero(2, 2);
  target(1, 1) = 1;
  target(0, 0) = -1;
  const double coeff_err = (model.Q / model.Q(1, 1) - target).norm() / target.norm();
  v.note("node", complex_text(node));
  v.note("coeff_rel_err", coeff_err);
  v.note("residual", model.residual);
  v.check(std::abs(node) <= 0.05, "node |z| <= 0.05");
  v.check(coeff_err <= 0.05, "boundary polynomial within 5% of z conj(z) - 1");
  v.check(model.residual <= 0.02, "residual <= 0.02");
  return v;
}

Verdict a4() {
  Verdict v;
  const cplx c(0.5, 0.25);
  const double r = 0.75, A = pi * r * r;
  const auto s = separate(spec_input(scenario("shifted-disk")), defaults(), 6);
  const double area_err = std::abs(s.area.value - A) / A;
  v.note("area", s.area.value);
  v.note("rel_err", area_err);
  v.check(area_err <= 0.02, "area within 2% of pi 0.5625");
  if (!s.centroid_integral) {
    v.check(false, "centroid integral defined");
    return v;
  }
  const double centroid_err = std::abs(s.centroid_integral->value - c * A) / std::abs(c * A);
  v.note("centroid_integral", complex_text(s.centroid_integral->value));
  v.note("centroid_rel_err", centroid_err);
  v.check(centroid_err <= 0.03, "centroid integral within 3% of c pi 0.5625");
  const auto model = padeFit(expSeries(s.cloud, 2), 1);
  const cplx node = model.nodes.at(0);
  v.note("node", complex_text(node));
  v.check(std::abs(node - c) <= 0.05, "node within 0.05 of the center");
  return v;
}

Verdict a5() {
  Verdict v;
  const auto &s = a1_separation();
  const int J = s.J;
  const auto bump = perturbationExperiment(s.H, FiniteRankPerturbation{{{0, 5, 1e-3}}}, 3, J, s.margin);
  const auto noise = perturbationExperiment(s.H, ScaledRandomPerturbation{1e-4, 2024}, 3, J, s.margin);
  double worst_ratio = 0;
  for (const auto *report : {&bump, &noise})
    for (const auto &row : report->rows)
      worst_ratio = std::max(worst_ratio, row.deviation / row.budget);
  v.note("max_deviation/budget", worst_ratio);
  v.check(bump.pass && bump.rows.size() == 16, "rank-one bump 1e-3 stays inside the envelopes");
  v.check(noise.pass && noise.rows.size() == 16, "random perturbation 1e-4 stays inside the envelopes");

  // a finite matrix: every commutator trace vanishes before and after
  const auto atoms = hessenbergOfSpec(scenario("atoms"), 16);
  v.check(atoms.complete, "atoms-only Hessenberg matrix is complete");
  double atom_worst = 0;
  for (const Perturbation &p : {Perturbation{FiniteRankPerturbation{{{0, 2, 1e-3}}}},
                                Perturbation{ScaledRandomPerturbation{1e-4, 2024}}}) {
    const auto report = perturbationExperiment(atoms, p, 3, 200);
    for (const auto &row : report.rows)
      atom_worst = std::max({atom_worst, std::abs(row.base), std::abs(row.perturbed)});
  }
  v.note("atoms_max|trace|", atom_worst);
  v.check(atom_worst <= 1e-10, "atoms-only traces <= 1e-10 before and after");
  return v;
}

Verdict a6() {
  Verdict v;
  const auto s = separate(spec_input(scenario("archipelago")), defaults(), 32);
  const double rel = std::abs(s.area.value - pi / 2) / (pi / 2);
  v.note("area", s.area.value);
  v.note("rel_err", rel);
  v.check(rel <= 0.03, "area within 3% of pi/2");
  const auto grid = classifyGrid(s.cloud, Box{-2, 2, -2, 2}, 61, 61, 16, 32);
  const auto comps = connectedComponents(grid);
  int considered = 0, correct = 0;
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const cplx z = grid.point(ix, iy);
      const double d1 = std::abs(std::abs(z - 1.0) - 0.5), d2 = std::abs(std::abs(z + 1.0) - 0.5);
      if (d1 < 0.15 || d2 < 0.15)
        continue;
      const bool inside = std::abs(z - 1.0) < 0.5 || std::abs(z + 1.0) < 0.5;
      ++considered;
      correct += (grid.label(ix, iy) == CellLabel::interior) == inside;
    }
  const double accuracy = double(correct) / considered;
  v.note("components", comps.count);
  v.note("accuracy", accuracy);
  v.check(comps.count == 2, "exactly 2 interior components");
  v.check(accuracy >= 0.95, ">= 95% correct labels away from the circles");
  return v;
}

Verdict a7() {
  Verdict v;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> count(1, 8);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto atoms = oracle::randomAtoms(rng, count(rng));
    MeasureSpec s;
    s.atoms = atoms;
    const auto H = hessenbergOfSpec(s, 16);
    const auto Ho = oracle::hessenberg(atoms);
    TraceEngine engine(H);
    for (int k = 0; k <= 3; ++k)
      for (int l = 0; k + l <= 3; ++l) {
        const auto t = engine.trace(k, l, 100);
        const auto ref = oracle::commutatorPartials(Ho, k, l);
        if (t.partials.size() != ref.size()) {
          v.check(false, "partial sequence lengths agree (trial " + std::to_string(trial) + ")");
          continue;
        }
        for (std::size_t j = 0; j < ref.size(); ++j)
          worst = std::max(worst, std::abs(t.partials[j] - cplx(ref[j])));
      }
  }
  v.note("measures", 50);
  v.note("max_diff", worst);
  v.check(worst <= 1e-10, "partial sums match the oracle to 1e-10");
  return v;
}

// Counts invariant violations over the synthetic corpus: the named scenarios,
// their area clouds, sample clouds drawn from them and random atomic measures.
Verdict a8() {
  Verdict v;
  int checked = 0, violations = 0;
  std::vector<std::string> first;
  auto expect = [&](bool ok, const std::string &what) {
    ++checked;
    if (!ok) {
      ++violations;
      if (first.size() < 3)
        first.push_back(what);
    }
  };

  auto moment_checks = [&](const ComplexMoments &m, const std::string &name) {
    const Eigen::MatrixXcd G = m.gram();
    expect((G - G.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * G.cwiseAbs().maxCoeff(),
           name + " moments Hermitian");
    expect(min_eigenvalue(G) >= -1e-12 * max_abs_eigenvalue(G), name + " moments PSD");
  };
  auto hessenberg_checks = [&](const HessenbergMatrix &H, const std::string &name) {
    for (int k = 0; k < H.size; ++k) {
      for (int n = k + 2; n < H.size; ++n)
        expect(H.entries(n, k) == 0.0, name + " structural zero below the subdiagonal");
      if (k + 1 < H.size)
        expect(H.entries(k + 1, k).real() > 0 && H.entries(k + 1, k).imag() == 0,
               name + " positive subdiagonal");
    }
  };
  auto trace_checks = [&](const HessenbergMatrix &H, int J, const std::string &name) {
    TraceEngine e(H);
    for (int k = 0; k <= 3; ++k)
      for (int l = 0; l <= 3; ++l) {
        const auto a = e.trace(k, l, J), b = e.trace(l, k, J);
        expect(std::abs(a.value - std::conj(b.value)) <= a.envelope + b.envelope,
               name + " trace conjugate symmetry");
      }
  };
  auto christoffel_checks = [&](const ComplexMoments &m, const std::string &name) {
    const auto basis = orthonormalize(m);
    const int n = std::min(basis.rank - 1, m.degree);
    for (const cplx z : {cplx(0, 0), cplx(0.7, 0.2), cplx(-1.1, 0.9), cplx(2.5, -1), cplx(0, 1.5)}) {
      const auto seq = christoffelSequence(basis, n, z);
      for (std::size_t i = 1; i < seq.size(); ++i)
        expect(seq[i] <= seq[i - 1] * (1 + 1e-9), name + " Christoffel monotone in n");
    }
  };
  auto exp_checks = [&](const Eigen::MatrixXcd &a, int d, double tol, const std::string &name) {
    const Eigen::MatrixXcd minus_b = -expSeries(a, d).b;
    expect((minus_b - minus_b.adjoint()).cwiseAbs().maxCoeff() <= 1e-9 * (1 + minus_b.cwiseAbs().maxCoeff()),
           name + " (-b) Hermitian");
    expect(min_eigenvalue(minus_b) >= -tol * std::max(1.0, max_abs_eigenvalue(minus_b)),
           name + " (-b) PSD");
  };

  for (const auto &name : scenarioNames()) {
    const auto spec = scenario(name);
    const auto m = moments_of_spec(spec, 12);
    moment_checks(m, name);
    christoffel_checks(m, name);
    const auto H = hessenbergOfSpec(spec, 60);
    hessenberg_checks(H, name);
    trace_checks(H, 40, name);
    const auto samples = drawSamples(spec, 400, 11);
    const auto ms = moments_of_samples(samples, 8);
    moment_checks(ms, name + " samples");
    hessenberg_checks(arnoldiHessenbergUpTo(samples, 30), name + " samples");
    if (!spec.shapes.empty()) {
      const auto cloud = moments_of_spec(cloud_only(spec), 6);
      moment_checks(cloud, name + " cloud");
      exp_checks(cloud.entries, 6, 1e-8, name + " cloud");
    }
  }
  // recovered cloud moments: PSD and (-b) PSD up to their envelopes
  const auto &a = a1_separation().cloud;
  const Eigen::MatrixXcd G = a.entries.transpose();
  const double slack = a.envelopes.norm();
  expect(min_eigenvalue(G) >= -slack, "recovered cloud moments PSD within envelopes");
  exp_checks(a.entries.topLeftCorner(5, 5), 4, 0.02, "recovered cloud");

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    MeasureSpec s;
    s.atoms = oracle::randomAtoms(rng, 1 + trial % 8);
    const std::string name = "random atoms " + std::to_string(trial);
    const auto m = moments_of_spec(s, 8);
    moment_checks(m, name);
    christoffel_checks(m, name);
    const auto H = hessenbergOfSpec(s, 16);
    hessenberg_checks(H, name);
    trace_checks(H, 100, name);
  }

  v.note("checks", checked);
  v.note("violations", violations);
  for (const auto &f : first)
    v.check(false, f);
  return v;
}

} // namespace

int main(int argc, char **argv) {
  const std::vector<std::string> selected(argv + 1, argv + argc);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> scenarios = {
      {"A1 area recovery", a1},
      {"A2 cloud-moment matrix", a2},
      {"A3 quadrature-domain recovery", a3},
      {"A4 translation/scale covariance", a4},
      {"A5 perturbation robustness", a5},
      {"A6 archipelago", a6},
      {"A7 oracle equivalence", a7},
      {"A8 invariant suite", a8},
  };
  int failed = 0, ran = 0;
  for (const auto &[name, run] : scenarios) {
    const std::string id = name.substr(0, name.find(' '));
    if (!selected.empty() && std::find(selected.begin(), selected.end(), id) == selected.end())
      continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
      const auto v = run();
      pass = v.pass();
      detail = v.text();
    } catch (const std::exception &e) {
      detail = std::string("error: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << " (" << std::fixed
              << std::setprecision(1) << seconds << " s)" << std::defaultfloat << std::endl;
  }
  if (ran == 0) {
    std::cerr << "acceptance: no scenario matches the arguments\n";
    return 2;
  }
  return failed ? 1 : 0;
}
