#include "pforest/point_io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include "pforest/errors.hpp"

namespace pforest {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ParseError(line, "bad number '" + token + "'");
  }
  return v;
}

namespace {

std::uint64_t parse_u64(const std::string& token, std::size_t line) {
  std::uint64_t v = 0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ParseError(line, "bad integer '" + token + "'");
  }
  return v;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

// "key=value" -> value, enforcing the key.
std::string expect_kv(const std::string& token, const std::string& key, std::size_t line) {
  const std::string prefix = key + "=";
  if (token.rfind(prefix, 0) != 0) {
    throw ParseError(line, "expected '" + key + "=...', got '" + token + "'");
  }
  return token.substr(prefix.size());
}

}  // namespace

std::string sample_header(const PointSample& sample) {
  const Window& w = sample.window();
  std::string h = "# poisson-forest v1 d=" + std::to_string(w.d);
  h += " rate=" + format_double(sample.rate());
  h += " window=";
  for (int i = 0; i < w.sdim(); ++i) {
    if (i > 0) h += ",";
    h += format_double(w.space_extent[i]);
  }
  h += "x[" + format_double(w.time_lo) + "," + format_double(w.time_hi) + "]";
  h += std::string(" boundary=") + (w.boundary == Boundary::Periodic ? "periodic" : "open");
  h += std::string(" palm=") + (sample.is_palm() ? "1" : "0");
  h += " seed=" + std::to_string(sample.seed());
  return h;
}

void save_points(const PointSample& sample, std::ostream& out) {
  out << sample_header(sample) << "\n";
  const int sdim = sample.window().sdim();
  for (const Point& p : sample.points()) {
    out << p.id;
    for (int i = 0; i < sdim; ++i) out << " " << format_double(p.x[i]);
    out << " " << format_double(p.r) << "\n";
  }
}

void save_points(const PointSample& sample, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open '" + path + "' for writing");
  save_points(sample, f);
  if (!f) throw ValidationError("write to '" + path + "' failed");
}

PointSample load_points(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError(1, "missing header");
  auto tok = split_ws(header);
  if (tok.size() != 9 || tok[0] != "#" || tok[1] != "poisson-forest" || tok[2] != "v1") {
    throw ParseError(1, "expected '# poisson-forest v1 ...' header");
  }
  Window w;
  w.d = static_cast<int>(parse_u64(expect_kv(tok[3], "d", 1), 1));
  if (w.d < 2 || w.d - 1 > kMaxSpaceDim) {
    throw ParseError(1, "unsupported dimension d=" + std::to_string(w.d));
  }
  const double rate = parse_double(expect_kv(tok[4], "rate", 1), 1);

  // window=<L1,...,L_{d-1}>x[<t0>,<t1>]
  {
    const std::string win = expect_kv(tok[5], "window", 1);
    const auto xpos = win.find("x[");
    if (xpos == std::string::npos || win.back() != ']') {
      throw ParseError(1, "bad window geometry '" + win + "'");
    }
    std::string extents = win.substr(0, xpos);
    int axis = 0;
    std::size_t start = 0;
    while (start <= extents.size()) {
      const auto comma = extents.find(',', start);
      const std::string piece =
          extents.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (axis >= w.sdim()) throw ParseError(1, "window lists more extents than d-1");
      w.space_extent[axis++] = parse_double(piece, 1);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (axis != w.sdim()) throw ParseError(1, "window lists fewer extents than d-1");
    const std::string times = win.substr(xpos + 2, win.size() - xpos - 3);
    const auto comma = times.find(',');
    if (comma == std::string::npos) throw ParseError(1, "bad window time interval");
    w.time_lo = parse_double(times.substr(0, comma), 1);
    w.time_hi = parse_double(times.substr(comma + 1), 1);
  }

  const std::string boundary = expect_kv(tok[6], "boundary", 1);
  if (boundary == "periodic") {
    w.boundary = Boundary::Periodic;
  } else if (boundary == "open") {
    w.boundary = Boundary::Open;
  } else {
    throw ParseError(1, "boundary must be 'periodic' or 'open'");
  }
  const std::string palm = expect_kv(tok[7], "palm", 1);
  bool is_palm = false;
  if (palm == "0") {
    is_palm = false;
  } else if (palm == "1") {
    is_palm = true;
  } else {
    throw ParseError(1, "palm must be 0 or 1");
  }
  const std::uint64_t seed = parse_u64(expect_kv(tok[8], "seed", 1), 1);

  std::vector<Point> pts;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_ws(line);
    if (fields.size() != static_cast<std::size_t>(w.sdim()) + 2) {
      throw ParseError(lineno, "expected " + std::to_string(w.sdim() + 2) +
                                   " fields (id, " + std::to_string(w.sdim()) +
                                   " space coordinates, time), got " +
                                   std::to_string(fields.size()));
    }
    Point p;
    p.id = parse_u64(fields[0], lineno);
    for (int i = 0; i < w.sdim(); ++i) p.x[i] = parse_double(fields[1 + i], lineno);
    p.r = parse_double(fields[w.sdim() + 1], lineno);
    pts.push_back(p);
  }
  try {
    return PointSample::create(w, rate, seed, std::move(pts), is_palm);
  } catch (const ValidationError& e) {
    throw ParseError(1, std::string("invalid sample: ") + e.what());
  }
}

PointSample load_points(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open '" + path + "' for reading");
  return load_points(f);
}

}  // namespace pforest
