#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pforest {

// One measured cell of an experiment table.
struct ReportRow {
  std::string cell;       // e.g. "d=2,L=20,T=1000"
  std::string statistic;  // e.g. "largest_fraction"
  double value = 0.0;
  std::optional<double> stderr_value;  // empty prints as ""
  std::uint64_t n = 0;
  std::string verdict;  // "pass", "fail", "info", or "inconclusive"
};

// Accumulates experiment output. `rows` feed the CSV; `notes` are free-form
// key=value lines for the text summary only (runtime, seeds, fit details),
// so the CSV stays byte-identical across machines.
class ExperimentReport {
 public:
  explicit ExperimentReport(std::string experiment) : experiment_(std::move(experiment)) {}

  const std::string& experiment() const { return experiment_; }

  void add_row(ReportRow row) { rows_.push_back(std::move(row)); }
  void note(const std::string& key, const std::string& value);
  void note(const std::string& key, double value);
  void note(const std::string& key, std::uint64_t value);

  const std::vector<ReportRow>& rows() const { return rows_; }
  const std::vector<std::string>& notes() const { return notes_; }

  // True when no row carries verdict "fail".
  bool passed() const;

  // CSV with header experiment,cell,statistic,value,stderr,n,verdict.
  void write_csv(std::ostream& out) const;
  // Human-oriented summary: notes then rows, one per line.
  void write_summary(std::ostream& out) const;

 private:
  std::string experiment_;
  std::vector<ReportRow> rows_;
  std::vector<std::string> notes_;
};

}  // namespace pforest
