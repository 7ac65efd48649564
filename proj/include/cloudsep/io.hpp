#pragma once

// File formats. Complex numbers are [re, im] pairs throughout.

#include "cloudsep/exptransform.hpp"
#include "cloudsep/hessenberg.hpp"
#include "cloudsep/measure.hpp"
#include "cloudsep/shape.hpp"
#include "cloudsep/traces.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cloudsep::io {

using json = nlohmann::ordered_json;

json toJson(cplx z);
cplx complexFromJson(const json &j);

// {"shapes":[{"kind":"disk","center":[x,y],"radius":r,"weight":w}, ...],
//  "atoms":[[re,im,mass],...], "samples":[[x,y,weight],...]}
MeasureSpec specFromJson(const json &j);
json toJson(const MeasureSpec &spec);

// {"degree": d, "entries": [[[re,im], ...], ...]} row-major in k.
ComplexMoments momentsFromJson(const json &j);
json toJson(const ComplexMoments &m);

// Moments file plus "envelopes", "area", "centroid", "J", "N", "exact".
CloudMoments cloudMomentsFromJson(const json &j);
json toJson(const CloudMoments &a);

json toJson(const TraceEstimate &t);
json toJson(const HessenbergMatrix &h);
json toJson(const Perturbation &p);
json toJson(const QuadratureDomainModel &model);
json toJson(const PerturbationReport &report);

/// Header `x,y,weight` (weight optional, default 1.0), one sample per row.
SampleCloud samplesFromCsv(std::istream &in);
void writeSamplesCsv(std::ostream &out, const SampleCloud &cloud);

/// `x,y,label,lambda_low,lambda_high`, one row per grid node.
void writeGridCsv(std::ostream &out, const ClassificationGrid &grid);
/// `x,y`, one row per boundary point.
void writeBoundaryCsv(std::ostream &out, const std::vector<cplx> &points);

json readJsonFile(const std::filesystem::path &path);
std::string readTextFile(const std::filesystem::path &path);
/// Writes to a temporary sibling and renames, so readers never see a
/// half-written file.
void writeTextFile(const std::filesystem::path &path, const std::string &text);

/// Round-trip decimal rendering used by every writer.
std::string formatNumber(double x);

} // namespace cloudsep::io
