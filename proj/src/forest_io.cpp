#include "pforest/forest_io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "pforest/errors.hpp"
#include "pforest/point_io.hpp"

namespace pforest {
namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::uint64_t parse_u64_tok(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(tok, &used);
    if (used != tok.size()) throw ParseError(line, "trailing characters in integer '" + tok + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError(line, "expected integer, got '" + tok + "'");
  }
}

}  // namespace

void save_forest(std::ostream& out, const Forest& forest) {
  const PointSample& s = forest.sample();
  out << sample_header(s) << '\n';
  out << "# forest roots=" << forest.roots().size()
      << " unresolved_fraction=" << format_double(forest.unresolved_fraction()) << '\n';
  for (std::uint32_t i = 0; i < forest.size(); ++i) {
    const Point& p = s.point(i);
    out << p.id << ' ';
    const std::uint32_t m = forest.mother_index(i);
    if (m == Forest::kNone) {
      out << '-';
    } else {
      out << s.point(m).id;
    }
    out << ' ' << forest.sister_rank_index(i) << ' ' << forest.component_of(p.id) << '\n';
  }
}

void save_forest(const std::string& path, const Forest& forest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  save_forest(out, forest);
  if (!out) throw ValidationError("write to '" + path + "' failed");
}

ForestFile load_forest(std::istream& in) {
  ForestFile file;
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError(1, "missing sample header");
  ++lineno;
  if (line.rfind("# poisson-forest", 0) != 0)
    throw ParseError(lineno, "expected sample header, got '" + line + "'");
  file.sample_header = line;

  if (!std::getline(in, line)) throw ParseError(2, "missing forest summary line");
  ++lineno;
  {
    const auto toks = split_ws(line);
    if (toks.size() != 4 || toks[0] != "#" || toks[1] != "forest")
      throw ParseError(lineno, "malformed forest summary line");
    const auto expect_kv = [&](const std::string& tok, const char* key) {
      const std::string prefix = std::string(key) + "=";
      if (tok.rfind(prefix, 0) != 0)
        throw ParseError(lineno, "expected '" + prefix + "...', got '" + tok + "'");
      return tok.substr(prefix.size());
    };
    file.roots = static_cast<std::size_t>(parse_u64_tok(expect_kv(toks[2], "roots"), lineno));
    file.unresolved_fraction = parse_double(expect_kv(toks[3], "unresolved_fraction"), lineno);
  }

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto toks = split_ws(line);
    if (toks.size() != 4)
      throw ParseError(lineno, "expected 4 fields, got " + std::to_string(toks.size()));
    ForestRow row;
    row.id = parse_u64_tok(toks[0], lineno);
    if (toks[1] == "-") {
      row.has_mother = false;
    } else {
      row.has_mother = true;
      row.mother_id = parse_u64_tok(toks[1], lineno);
    }
    row.sister_rank = static_cast<std::uint32_t>(parse_u64_tok(toks[2], lineno));
    row.component_id = parse_u64_tok(toks[3], lineno);
    file.rows.push_back(row);
  }
  return file;
}

ForestFile load_forest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "' for reading");
  return load_forest(in);
}

}  // namespace pforest
