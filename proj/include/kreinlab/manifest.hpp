#pragma once

// Run manifests: a YAML document with one table per experiment plus an
// optional `run` table. Grammar and defaults are documented in
// docs/manifest.md.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kreinlab/experiments.hpp"

namespace kreinlab {

struct RunManifest {
  std::vector<ExperimentConfig> experiments;
  std::filesystem::path output_dir = "kreinlab_out";
  bool json = true;
  bool csv = true;
  /// 0 = summary only, 1 = per-criterion lines, 2 = measurements too.
  int verbosity = 1;
};

/// Parse and fully validate. Throws std::invalid_argument naming the
/// offending key or violated bound, or std::runtime_error if the file cannot
/// be read.
RunManifest parse_manifest(const std::filesystem::path& path);
RunManifest parse_manifest_text(const std::string& text);

/// Parses "json,csv"-style format lists into the manifest flags.
void set_formats(RunManifest& m, const std::string& formats);

struct DispatchOptions {
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
};

/// Runs every experiment in order, writes outputs, prints a summary table.
/// Returns 0 iff every experiment ran and passed, 1 otherwise. Experiment
/// failures are recorded and the run continues; I/O failures throw
/// std::runtime_error.
int dispatch(const RunManifest& manifest, std::ostream& out, const DispatchOptions& opts = {});

}  // namespace kreinlab
