// poisson-forest: sampling, forest building, succession enumeration, walk
// extraction and Monte-Carlo experiments over space-time Poisson samples.
//
// Exit codes: 0 success, 1 I/O or data error, 2 usage error,
// 3 experiment verdict failed.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pforest/errors.hpp"
#include "pforest/experiments.hpp"
#include "pforest/forest.hpp"
#include "pforest/forest_io.hpp"
#include "pforest/point.hpp"
#include "pforest/point_io.hpp"
#include "pforest/succession.hpp"
#include "pforest/walks.hpp"

namespace {

using namespace pforest;

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;
constexpr int kExitVerdict = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": bad number '" + tok + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
  std::vector<int> out;
  for (double v : parse_double_list(text, flag)) {
    const int k = static_cast<int>(v);
    if (static_cast<double>(k) != v) throw UsageError(std::string(flag) + ": expected integers");
    out.push_back(k);
  }
  return out;
}

void parse_time_range(const std::string& text, double& lo, double& hi) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--time: expected <lo>:<hi>");
  const auto parts = std::array<std::string, 2>{text.substr(0, colon), text.substr(colon + 1)};
  std::array<double, 2> vals{};
  for (int i = 0; i < 2; ++i) {
    try {
      std::size_t used = 0;
      vals[i] = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
    } catch (const std::exception&) {
      throw UsageError("--time: bad number '" + parts[i] + "'");
    }
  }
  if (!(vals[0] < vals[1])) throw UsageError("--time: needs lo < hi");
  lo = vals[0];
  hi = vals[1];
}

Boundary parse_boundary(const std::string& text) {
  if (text == "periodic") return Boundary::Periodic;
  if (text == "open") return Boundary::Open;
  throw UsageError("--boundary: expected 'periodic' or 'open'");
}

Window build_window(int d, const std::string& space, const std::string& time,
                    const std::string& boundary) {
  if (d < 2 || d > kMaxSpaceDim + 1)
    throw UsageError("--d: must lie in [2, " + std::to_string(kMaxSpaceDim + 1) + "]");
  Window w;
  w.d = d;
  const std::vector<double> extents = parse_double_list(space, "--space");
  if (extents.size() == 1) {
    for (int i = 0; i < w.sdim(); ++i) w.space_extent[i] = extents[0];
  } else if (extents.size() == static_cast<std::size_t>(w.sdim())) {
    for (int i = 0; i < w.sdim(); ++i) w.space_extent[i] = extents[i];
  } else {
    throw UsageError("--space: expected 1 or d-1 extents");
  }
  parse_time_range(time, w.time_lo, w.time_hi);
  w.boundary = parse_boundary(boundary);
  return w;
}

// Output sink: path or stdout. File contents are identical either way.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ValidationError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    stream().flush();
    if (file_.is_open() && !file_) throw ValidationError("error writing output file");
    if (!file_.is_open() && !std::cout) throw ValidationError("error writing to stdout");
  }

 private:
  std::ofstream file_;
};

bool looks_like_forest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open input file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) return false;
  if (!std::getline(in, line)) return false;
  return line.rfind("# forest", 0) == 0;
}

// Points plus the forest built over them; the sample is heap-held because the
// forest keeps a pointer to it.
struct Bundle {
  std::unique_ptr<PointSample> sample;
  std::optional<Forest> forest;
};

Bundle load_points_bundle(const std::string& path) {
  Bundle b;
  b.sample = std::make_unique<PointSample>(load_points(path));
  b.forest.emplace(Forest::build(*b.sample));
  return b;
}

// A forest file carries no coordinates, only the sample header; the sample is
// regenerated from that header and the stored rows are verified against the
// rebuilt forest so a stale or hand-edited file cannot pass silently.
Bundle load_forest_bundle(const std::string& path) {
  const ForestFile ff = load_forest(path);
  std::istringstream header_only(ff.sample_header + "\n");
  const PointSample header = load_points(header_only);
  PointSample regen = sample_poisson(header.rate(), header.window(), header.seed());
  if (header.is_palm()) regen = palm_version(regen);

  Bundle b;
  b.sample = std::make_unique<PointSample>(std::move(regen));
  b.forest.emplace(Forest::build(*b.sample));
  const Forest& f = *b.forest;

  if (ff.rows.size() != b.sample->size())
    throw ValidationError("forest file does not match its sample header (row count)");
  for (const ForestRow& row : ff.rows) {
    const auto idx = b.sample->index_of(row.id);
    if (!idx) throw ValidationError("forest file does not match its sample header (ids)");
    const std::uint32_t m = f.mother_index(*idx);
    const bool has_mother = m != Forest::kNone;
    if (has_mother != row.has_mother ||
        (has_mother && b.sample->point(m).id != row.mother_id) ||
        f.sister_rank_index(*idx) != row.sister_rank ||
        f.component_of_index(*idx) != row.component_id) {
      throw ValidationError("forest file does not match its sample header (links)");
    }
  }
  return b;
}

Bundle load_bundle(const std::string& path) {
  return looks_like_forest_file(path) ? load_forest_bundle(path) : load_points_bundle(path);
}

void write_space_vec(std::ostream& out, const SpaceVec& x, int sdim) {
  for (int i = 0; i < sdim; ++i) out << ' ' << format_double(x[i]);
}

// --- subcommand bodies -------------------------------------------------------

struct SampleArgs {
  int d = 2;
  double rate = 1.0;
  std::string space = "20";
  std::string time = "0:1000";
  std::string boundary = "periodic";
  bool palm = false;
  std::uint64_t seed = 7;
  std::string output;
};

int cmd_sample(const SampleArgs& a) {
  const Window w = build_window(a.d, a.space, a.time, a.boundary);
  PointSample s = sample_poisson(a.rate, w, a.seed);
  if (a.palm) s = palm_version(s);
  Sink sink(a.output);
  save_points(s, sink.stream());
  sink.finish();
  return kExitOk;
}

struct ForestArgs {
  std::string input;
  std::string output;
};

int cmd_forest(const ForestArgs& a) {
  if (looks_like_forest_file(a.input))
    throw ValidationError("input is already a forest file; pass a point file");
  const Bundle b = load_points_bundle(a.input);
  Sink sink(a.output);
  save_forest(sink.stream(), *b.forest);
  sink.finish();
  return kExitOk;
}

struct SuccessionArgs {
  std::string input;
  std::uint64_t anchor = 0;
  std::uint64_t back = 50;
  std::uint64_t forward = 50;
  std::string output;
};

int cmd_succession(const SuccessionArgs& a) {
  const Bundle b = load_bundle(a.input);
  const PointSample& s = *b.sample;
  if (!s.index_of(a.anchor))
    throw ValidationError("anchor id " + std::to_string(a.anchor) + " is not in the sample");
  const SuccessionLabels line = enumerate_line(*b.forest, a.anchor, a.back, a.forward);
  Sink sink(a.output);
  std::ostream& out = sink.stream();
  out << sample_header(s) << '\n';
  out << "# succession anchor=" << a.anchor << " back=" << a.back << " forward=" << a.forward
      << " complete=" << (line.complete ? 1 : 0) << '\n';
  const int sdim = s.window().sdim();
  for (const auto& [n, id] : line.labels) {
    const Point& p = s.point(*s.index_of(id));
    out << n << ' ' << id;
    write_space_vec(out, p.x, sdim);
    out << ' ' << format_double(p.r) << '\n';
  }
  sink.finish();
  return kExitOk;
}

struct WalkArgs {
  std::string input;
  std::optional<std::uint64_t> id;
  std::optional<double> slice_t;
  std::optional<double> t_max;
  std::string output;
};

int cmd_walk(const WalkArgs& a) {
  const Bundle b = load_bundle(a.input);
  const PointSample& s = *b.sample;
  const int sdim = s.window().sdim();
  Sink sink(a.output);
  std::ostream& out = sink.stream();
  if (a.id) {
    const double t_max = a.t_max.value_or(s.window().time_hi);
    const Trajectory tr = trajectory(*b.forest, *a.id, t_max);
    out << sample_header(s) << '\n';
    out << "# trajectory id=" << *a.id << " t_max=" << format_double(t_max) << '\n';
    out << *a.id << '\n';
    for (std::size_t k = 0; k < tr.jump_times.size(); ++k) {
      out << format_double(tr.jump_times[k]);
      write_space_vec(out, tr.positions[k], sdim);
      out << '\n';
    }
  } else {
    const SliceConfig slice = eta_slice(*b.forest, *a.slice_t);
    out << sample_header(s) << '\n';
    out << "# slice t=" << format_double(*a.slice_t) << " walkers=" << slice.walker_count()
        << '\n';
    out << format_double(slice.t) << '\n';
    for (const SliceWalker& wk : slice.walkers) {
      bool first = true;
      for (int i = 0; i < sdim; ++i) {
        out << (first ? "" : " ") << format_double(wk.pos[i]);
        first = false;
      }
      for (std::uint64_t fid : wk.founders) out << ' ' << fid;
      out << '\n';
    }
  }
  sink.finish();
  return kExitOk;
}

struct ExperimentArgs {
  std::string name;
  ExperimentConfig cfg;  // populated from defaults + flags
  std::string output;
};

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

// Everything needed to reproduce the run, in one header line. Worker count is
// deliberately absent: it must not affect the bytes that follow.
std::string experiment_header(const ExperimentConfig& c) {
  std::string h = "# poisson-forest v1 experiment=" + c.name;
  h += " d=" + std::to_string(c.d);
  h += " rate=" + format_double(c.rate);
  h += " L=" + format_double(c.space_extent);
  h += " time=" + format_double(c.time_lo) + ":" + format_double(c.time_hi);
  h += std::string(" boundary=") + (c.boundary == Boundary::Periodic ? "periodic" : "open");
  h += " seed=" + std::to_string(c.seed);
  h += " replicas=" + std::to_string(c.replicas);
  h += " alpha=" + format_double(c.alpha);
  if (!c.t_grid.empty()) h += " t_grid=" + join_doubles(c.t_grid);
  if (!c.separations.empty()) h += " separations=" + join_doubles(c.separations);
  if (!c.sizes.empty()) h += " sizes=" + join_doubles(c.sizes);
  if (!c.shift_orders.empty()) h += " shift_orders=" + join_ints(c.shift_orders);
  if (c.name == "ergodicity") {
    h += " region_side=" + format_double(c.region_side);
    h += " grid_spacing=" + format_double(c.grid_spacing);
  }
  if (c.name == "meeting-bound") {
    h += " pairs=" + std::to_string(c.pairs);
    h += " horizon=" + format_double(c.horizon);
  }
  if (c.name == "marginal-dynamics") h += " events=" + std::to_string(c.events);
  if (c.name == "younger-coalescence")
    h += " walks_per_replica=" + std::to_string(c.walks_per_replica);
  return h;
}

int cmd_experiment(const ExperimentArgs& a) {
  const ExperimentReport report = run_experiment(a.cfg);
  Sink sink(a.output);
  sink.stream() << experiment_header(a.cfg) << '\n';
  report.write_csv(sink.stream());
  sink.finish();
  report.write_summary(std::cerr);
  return report.passed() ? kExitOk : kExitVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson forests, succession lines and coalescing walks"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  // sample
  SampleArgs sa;
  CLI::App* sample = app.add_subcommand("sample", "Sample a Poisson point configuration");
  sample->set_config("--config");
  sample->add_option("--d", sa.d, "Space-time dimension d (space has d-1 axes)");
  sample->add_option("--rate", sa.rate, "Poisson intensity")->required();
  sample->add_option("--space", sa.space, "Space extents, comma separated (one value = cubic)");
  sample->add_option("--time", sa.time, "Time window lo:hi");
  sample->add_option("--boundary", sa.boundary, "periodic | open");
  sample->add_flag("--palm", sa.palm, "Insert the origin as point id 0");
  sample->add_option("--seed", sa.seed, "RNG seed");
  sample->add_option("-o,--output", sa.output, "Output path (default stdout)");
  sample->callback([&] { exit_code = cmd_sample(sa); });

  // forest
  ForestArgs fa;
  CLI::App* forest = app.add_subcommand("forest", "Build the mother-link forest over a sample");
  forest->set_config("--config");
  forest->add_option("-i,--input", fa.input, "Point file")->required();
  forest->add_option("-o,--output", fa.output, "Output path (default stdout)");
  forest->callback([&] { exit_code = cmd_forest(fa); });

  // succession
  SuccessionArgs na;
  CLI::App* succession =
      app.add_subcommand("succession", "Enumerate the succession line through an anchor");
  succession->set_config("--config");
  succession->add_option("-i,--input", na.input, "Point or forest file")->required();
  succession->add_option("--anchor", na.anchor, "Anchor point id");
  succession->add_option("--back", na.back, "Predecessor steps");
  succession->add_option("--forward", na.forward, "Successor steps");
  succession->add_option("-o,--output", na.output, "Output path (default stdout)");
  succession->callback([&] { exit_code = cmd_succession(na); });

  // walk
  WalkArgs wa;
  std::uint64_t walk_id = 0;
  double walk_slice = 0.0;
  double walk_tmax = 0.0;
  CLI::App* walk = app.add_subcommand("walk", "Extract a walk trajectory or an eta slice");
  walk->set_config("--config");
  walk->add_option("-i,--input", wa.input, "Point or forest file")->required();
  CLI::Option* id_opt = walk->add_option("--id", walk_id, "Trajectory of the walk born at id");
  CLI::Option* slice_opt =
      walk->add_option("--slice", walk_slice, "Occupied positions at time t");
  CLI::Option* tmax_opt = walk->add_option("--t-max", walk_tmax, "Trajectory horizon");
  walk->add_option("-o,--output", wa.output, "Output path (default stdout)");
  id_opt->excludes(slice_opt);
  walk->callback([&] {
    if (id_opt->count() > 0) wa.id = walk_id;
    if (slice_opt->count() > 0) wa.slice_t = walk_slice;
    if (tmax_opt->count() > 0) wa.t_max = walk_tmax;
    if (!wa.id && !wa.slice_t) throw UsageError("walk: pass exactly one of --id or --slice");
    exit_code = cmd_walk(wa);
  });

  // experiment
  ExperimentArgs ea;
  std::string exp_d, exp_rate, exp_space, exp_time, exp_boundary, exp_seed, exp_replicas;
  std::string exp_tgrid, exp_seps, exp_sizes, exp_orders;
  std::string exp_region, exp_spacing, exp_pairs, exp_horizon, exp_events, exp_walks, exp_alpha;
  int exp_workers = 0;
  CLI::App* experiment = app.add_subcommand("experiment", "Run a named Monte-Carlo experiment");
  experiment->set_config("--config");
  experiment->add_option("name", ea.name, "Experiment name")->required();
  CLI::Option* o_d = experiment->add_option("--d", exp_d, "Space-time dimension");
  CLI::Option* o_rate = experiment->add_option("--rate", exp_rate, "Poisson intensity");
  CLI::Option* o_space = experiment->add_option("--space", exp_space, "Cubic space extent");
  CLI::Option* o_time = experiment->add_option("--time", exp_time, "Time window lo:hi");
  CLI::Option* o_boundary = experiment->add_option("--boundary", exp_boundary, "periodic | open");
  CLI::Option* o_seed = experiment->add_option("--seed", exp_seed, "RNG seed");
  CLI::Option* o_replicas = experiment->add_option("--replicas", exp_replicas, "Replica count");
  CLI::Option* o_workers =
      experiment->add_option("--workers", exp_workers, "Worker threads (0 = hardware)");
  CLI::Option* o_tgrid = experiment->add_option("--t-grid", exp_tgrid, "Time grid, comma list");
  CLI::Option* o_seps =
      experiment->add_option("--separations", exp_seps, "Initial separations, comma list");
  CLI::Option* o_sizes =
      experiment->add_option("--sizes", exp_sizes, "Window extent grid, comma list");
  CLI::Option* o_orders =
      experiment->add_option("--shift-orders", exp_orders, "Point-shift orders, comma list");
  CLI::Option* o_region = experiment->add_option("--region-side", exp_region, "Comparison box");
  CLI::Option* o_spacing = experiment->add_option("--grid-spacing", exp_spacing, "Initial grid");
  CLI::Option* o_pairs = experiment->add_option("--pairs", exp_pairs, "Walker pairs");
  CLI::Option* o_horizon = experiment->add_option("--horizon", exp_horizon, "Pair horizon");
  CLI::Option* o_events = experiment->add_option("--events", exp_events, "Event count");
  CLI::Option* o_walks =
      experiment->add_option("--walks-per-replica", exp_walks, "Walk subsample size");
  CLI::Option* o_alpha = experiment->add_option("--alpha", exp_alpha, "KS level");
  experiment->add_option("-o,--output", ea.output, "Report CSV path (default stdout)");
  experiment->callback([&] {
    const auto names = experiment_names();
    if (std::find(names.begin(), names.end(), ea.name) == names.end()) {
      std::string msg = "unknown experiment '" + ea.name + "'; available:";
      for (const auto& n : names) msg += " " + n;
      throw UsageError(msg);
    }
    ExperimentConfig cfg = default_config(ea.name);
    const auto as_u64 = [](const std::string& s, const char* flag) {
      try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<std::uint64_t>(v);
      } catch (const std::exception&) {
        throw UsageError(std::string(flag) + ": bad integer '" + s + "'");
      }
    };
    const auto as_double = [](const std::string& s, const char* flag) {
      try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        throw UsageError(std::string(flag) + ": bad number '" + s + "'");
      }
    };
    if (o_d->count()) {
      cfg.d = static_cast<int>(as_u64(exp_d, "--d"));
      apply_dimension_defaults(cfg);
    }
    if (o_rate->count()) cfg.rate = as_double(exp_rate, "--rate");
    if (o_space->count()) cfg.space_extent = as_double(exp_space, "--space");
    if (o_time->count()) parse_time_range(exp_time, cfg.time_lo, cfg.time_hi);
    if (o_boundary->count()) cfg.boundary = parse_boundary(exp_boundary);
    if (o_seed->count()) cfg.seed = as_u64(exp_seed, "--seed");
    if (o_replicas->count())
      cfg.replicas = static_cast<std::uint32_t>(as_u64(exp_replicas, "--replicas"));
    if (o_workers->count()) cfg.workers = exp_workers;
    if (o_tgrid->count()) cfg.t_grid = parse_double_list(exp_tgrid, "--t-grid");
    if (o_seps->count()) cfg.separations = parse_double_list(exp_seps, "--separations");
    if (o_sizes->count()) cfg.sizes = parse_double_list(exp_sizes, "--sizes");
    if (o_orders->count()) cfg.shift_orders = parse_int_list(exp_orders, "--shift-orders");
    if (o_region->count()) cfg.region_side = as_double(exp_region, "--region-side");
    if (o_spacing->count()) cfg.grid_spacing = as_double(exp_spacing, "--grid-spacing");
    if (o_pairs->count()) cfg.pairs = as_u64(exp_pairs, "--pairs");
    if (o_horizon->count()) cfg.horizon = as_double(exp_horizon, "--horizon");
    if (o_events->count()) cfg.events = as_u64(exp_events, "--events");
    if (o_walks->count())
      cfg.walks_per_replica = static_cast<std::uint32_t>(as_u64(exp_walks, "--walks-per-replica"));
    if (o_alpha->count()) cfg.alpha = as_double(exp_alpha, "--alpha");
    ea.cfg = cfg;
    exit_code = cmd_experiment(ea);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return exit_code;
}
