#pragma once

#include "cloudsep/errors.hpp"
#include "cloudsep/exptransform.hpp"
#include "cloudsep/hessenberg.hpp"
#include "cloudsep/measure.hpp"
#include "cloudsep/precision.hpp"
#include "cloudsep/shape.hpp"
#include "cloudsep/traces.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cloudsep {

enum class Method { pade, christoffel, both };

Method parseMethod(const std::string &text);
std::string to_string(Method m);

// Every default of the command line lives here.
struct RunConfig {
  std::string input;
  int degree = 6;   // cloud-moment degree d
  int cutoff = 200; // diagonal cutoff J
  int margin = kDefaultMargin;
  Precision precision;
  Method method = Method::both;
  int grid_nx = 41;
  int grid_ny = 41;
  std::optional<Box> box; // default: inferred from the cloud moments
  std::string out = ".";
  std::uint64_t seed = 0;
  int order = 0; // quadrature-domain order; 0 selects it from the series
  int n1 = 16;   // Christoffel degrees
  int n2 = 32;
  bool svg = false;

  /// Throws InvalidInput on inconsistent settings.
  void validate() const;
};

enum class InputKind { spec, samples, moments, cloud_moments };

std::string to_string(InputKind kind);

struct LoadedInput {
  InputKind kind = InputKind::spec;
  MeasureSpec spec;
  SampleCloud samples;
  ComplexMoments moments;
  CloudMoments cloud;
};

/// Reads a measure spec (JSON with shapes/atoms/samples), a moments file
/// (JSON with degree/entries), a cloud-moments file (also with envelopes)
/// or a samples CSV.
LoadedInput loadInput(const std::string &path);

struct Separation {
  InputKind kind = InputKind::spec;
  HessenbergMatrix H;
  CloudMoments cloud;
  std::vector<TraceEstimate> traces; // all k, l <= degree
  ScalarEstimate area;
  std::optional<ComplexEstimate> centroid_integral;
  std::optional<cplx> centroid_series;
  int J_requested = 0;
  int J = 0;
  /// Rows beyond the traces' reach actually used; grows past the configured
  /// margin while the increments near J still depend on the matrix size.
  int margin = 0;
  bool clamped = false;
  /// The area is zero within an envelope of at most 1e-8.
  bool cloud_absent = false;
  std::vector<std::string> warnings;
};

/// Steps 1-3 of the algorithm: Hessenberg matrix, traces up to `degree`,
/// cloud moments up to `cloud_degree` (>= degree). The configured margin is
/// doubled (up to three times) while the last increments change by more
/// than 5% when the matrix is cut back to half its margin.
Separation separate(const LoadedInput &input, const RunConfig &config, int cloud_degree);

/// Box around the cloud: centroid +- 1.5 r with r the radius of the disk
/// having the cloud's area-normalized second moment.
Box inferBox(const CloudMoments &cloud);

/// Named measures used by `synth --scenario` and the README walkthrough.
MeasureSpec scenario(const std::string &name);
std::vector<std::string> scenarioNames();

/// n equal-weight samples of the normalized measure times its total mass.
SampleCloud drawSamples(const MeasureSpec &spec, int n, std::uint64_t seed);

/// "none", "bump:ROW,COL,RE[,IM][;ROW,COL,RE[,IM]...]" or
/// "random:NORM[,DECAY]" (seeded by the run seed).
Perturbation parsePerturbation(const std::string &text, std::uint64_t seed);

// Subcommands. Each returns the process exit code and writes its files to
// config.out only after all computations succeeded. Library errors
// propagate; exitCode maps them.
int cmdSynth(const RunConfig &config, const std::string &scenario_name, int samples,
             std::ostream &log);
int cmdSeparate(const RunConfig &config, std::ostream &log);
int cmdReconstruct(const RunConfig &config, std::ostream &log);
int cmdPerturb(const RunConfig &config, const std::string &perturbation, std::ostream &log);
int cmdReport(const RunConfig &config, std::ostream &out);

/// 2 for input validation failures, 3 for NoConvergence, 4 for
/// FitIllConditioned, 1 otherwise.
int exitCode(const Error &e);

} // namespace cloudsep
