#pragma once

// Machine-readable output: one JSON document per experiment (schema in
// docs/report.schema.json) and one CSV per series with the columns
//   l,value,mode,multiplicity
// (l is 1-based; multiplicity is 1 for mode 0 and 2 for m >= 1).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kreinlab/experiments.hpp"

namespace kreinlab {

inline constexpr const char* kReportSchemaVersion = "1.0";

/// JSON text of a report. `csv_files` lists the CSV file names written for
/// report.series, in the same order (may be empty when CSV output is off).
std::string report_json(const ExperimentReport& report, const std::vector<std::string>& csv_files = {});

/// Writes one series as CSV (header + one row per entry, values with 17
/// significant digits so reruns are byte-identical).
void write_csv(std::ostream& out, const spectra::SingularValueSeries& series);

struct WrittenFiles {
  std::filesystem::path json;
  std::vector<std::filesystem::path> csv;
};

/// Writes <dir>/<name>.json and <dir>/<name>_<series>.csv. Throws
/// std::runtime_error on any I/O failure.
WrittenFiles write_outputs(const ExperimentReport& report, const std::filesystem::path& dir, bool json,
                           bool csv);

}  // namespace kreinlab
