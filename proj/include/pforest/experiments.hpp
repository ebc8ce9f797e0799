#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pforest/point.hpp"
#include "pforest/report.hpp"

namespace pforest {

// Shared knob set for all experiments. Each driver reads the subset it
// documents; default_config() pins the canonical values per experiment and
// apply_dimension_defaults() swaps in matched-budget geometry when d changes.
struct ExperimentConfig {
  std::string name;
  int d = 2;
  double rate = 1.0;
  double space_extent = 20.0;  // cubic space window, centered
  double time_lo = 0.0;
  double time_hi = 1000.0;
  Boundary boundary = Boundary::Periodic;
  std::uint32_t replicas = 50;
  std::uint64_t seed = 7;
  int workers = 1;  // 0 = hardware concurrency

  std::vector<double> t_grid;       // connectivity / younger-coalescence / ergodicity
  std::vector<double> separations;  // meeting-bound D grid
  std::vector<double> sizes;        // branch-sizes window extents
  std::vector<int> shift_orders;    // palm-invariance n grid

  double region_side = 4.0;    // ergodicity comparison box side
  double grid_spacing = 0.5;   // ergodicity saturated initial condition
  std::uint64_t pairs = 10000;     // meeting-bound pairs per separation
  double horizon = 4096.0;         // meeting-bound time horizon
  std::uint64_t events = 10000;    // marginal-dynamics event count
  std::uint32_t walks_per_replica = 2000;  // younger-coalescence subsample
  double alpha = 0.01;  // KS level

  void validate() const;  // throws ValidationError
};

// Canonical experiment names (hyphenated, CLI-facing).
std::vector<std::string> experiment_names();

// Pinned defaults for a named experiment (d = 2 baseline geometry).
// Throws ValidationError on unknown name.
ExperimentConfig default_config(const std::string& name);

// Replaces geometry knobs with the matched-budget defaults for cfg.d.
// Only touches fields still at their default_config(name) values is the
// caller's responsibility; this overwrites unconditionally.
void apply_dimension_defaults(ExperimentConfig& cfg);

ExperimentReport exp_connectivity(const ExperimentConfig& cfg);
ExperimentReport exp_branch_sizes(const ExperimentConfig& cfg);
ExperimentReport exp_palm_invariance(const ExperimentConfig& cfg);
ExperimentReport exp_ergodicity(const ExperimentConfig& cfg);
ExperimentReport exp_meeting_bound(const ExperimentConfig& cfg);
ExperimentReport exp_younger_coalescence(const ExperimentConfig& cfg);
ExperimentReport exp_marginal_dynamics(const ExperimentConfig& cfg);

// Dispatch by cfg.name. Throws ValidationError on unknown name.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

namespace detail {
// Volume of the intersection of two unit balls in `dim` dimensions whose
// centers are `dist` apart. Exact closed forms for dim 3 and 4.
double unit_lens_volume(int dim, double dist);
}  // namespace detail

}  // namespace pforest
