#pragma once

#include <iosfwd>
#include <string>

#include "pforest/point.hpp"

namespace pforest {

// Shortest decimal form that parses back to the identical double
// (std::to_chars round-trip guarantee).
std::string format_double(double v);

// Strict double parser; the whole token must be consumed.
double parse_double(const std::string& token, std::size_t line);

// Point file format, one LF-terminated line each:
//   # poisson-forest v1 d=<d> rate=<rate> window=<L1,...>x[<t0>,<t1>] boundary=<periodic|open> palm=<0|1> seed=<seed>
//   <id> <x1> ... <x_{d-1}> <r>
// Numbers are written with format_double, so save/load round-trips bit-exactly.
void save_points(const PointSample& sample, std::ostream& out);
void save_points(const PointSample& sample, const std::string& path);

// Throws ParseError naming the offending line on malformed input; the loaded
// sample is re-validated through PointSample::create.
PointSample load_points(std::istream& in);
PointSample load_points(const std::string& path);

// Header line as written by save_points (reused by other exporters).
std::string sample_header(const PointSample& sample);

}  // namespace pforest
