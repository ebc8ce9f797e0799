#pragma once

#include <iosfwd>
#include <string>

#include "pforest/forest.hpp"

namespace pforest {

// Forest text format: the sample header line, a summary line
//   # forest roots=<k> unresolved_fraction=<f>
// and one row per point (ascending id):
//   <id> <mother_id|-> <sister_rank|0> <component_id>
void save_forest(std::ostream& out, const Forest& forest);
void save_forest(const std::string& path, const Forest& forest);

// Parsed mirror of one forest row.
struct ForestRow {
  std::uint64_t id = 0;
  bool has_mother = false;
  std::uint64_t mother_id = 0;
  std::uint32_t sister_rank = 0;
  std::uint64_t component_id = 0;
};

struct ForestFile {
  std::string sample_header;
  std::size_t roots = 0;
  double unresolved_fraction = 0.0;
  std::vector<ForestRow> rows;
};

// Reads a forest file; validates the two header lines and per-row field
// counts. Throws ParseError with the 1-based offending line on failure.
ForestFile load_forest(std::istream& in);
ForestFile load_forest(const std::string& path);

}  // namespace pforest
