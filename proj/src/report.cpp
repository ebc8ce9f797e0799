#include "pforest/report.hpp"

#include <ostream>

#include "pforest/point_io.hpp"

namespace pforest {
namespace {

// Commas and quotes never appear in our cells by construction; guard anyway.
std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void ExperimentReport::note(const std::string& key, const std::string& value) {
  notes_.push_back(key + "=" + value);
}

void ExperimentReport::note(const std::string& key, double value) {
  notes_.push_back(key + "=" + format_double(value));
}

void ExperimentReport::note(const std::string& key, std::uint64_t value) {
  notes_.push_back(key + "=" + std::to_string(value));
}

bool ExperimentReport::passed() const {
  for (const auto& row : rows_) {
    if (row.verdict == "fail") return false;
  }
  return true;
}

void ExperimentReport::write_csv(std::ostream& out) const {
  out << "experiment,cell,statistic,value,stderr,n,verdict\n";
  for (const auto& row : rows_) {
    out << csv_escape(experiment_) << ',' << csv_escape(row.cell) << ','
        << csv_escape(row.statistic) << ',' << format_double(row.value) << ',';
    if (row.stderr_value) out << format_double(*row.stderr_value);
    out << ',' << row.n << ',' << csv_escape(row.verdict) << '\n';
  }
}

void ExperimentReport::write_summary(std::ostream& out) const {
  out << "experiment=" << experiment_ << '\n';
  for (const auto& n : notes_) out << n << '\n';
  for (const auto& row : rows_) {
    out << row.cell << " | " << row.statistic << " = " << format_double(row.value);
    if (row.stderr_value) out << " +- " << format_double(*row.stderr_value);
    out << " (n=" << row.n << ") [" << row.verdict << "]\n";
  }
  out << "result=" << (passed() ? "pass" : "fail") << '\n';
}

}  // namespace pforest
