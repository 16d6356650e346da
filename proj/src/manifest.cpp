#include "kreinlab/manifest.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "kreinlab/report.hpp"

namespace kreinlab {
namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("manifest: " + where + ": " + what);
}

template <class T>
T scalar(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) fail(where, "expected a scalar value");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(where, "cannot convert '" + node.Scalar() + "'");
  }
}

template <class T>
std::vector<T> list(const YAML::Node& node, const std::string& where) {
  // A scalar is accepted as a one-element list.
  if (node.IsScalar()) return {scalar<T>(node, where)};
  if (!node.IsSequence()) fail(where, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < node.size(); ++i)
    out.push_back(scalar<T>(node[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const YAML::Node&, const std::string&)>;

const std::map<std::string, Setter>& config_keys() {
  static const std::map<std::string, Setter> keys{
      {"c0", [](auto& c, auto& n, auto& w) { c.c0 = scalar<double>(n, w); }},
      {"R", [](auto& c, auto& n, auto& w) { c.R = scalar<double>(n, w); }},
      {"N", [](auto& c, auto& n, auto& w) { c.N = scalar<int>(n, w); }},
      {"grading", [](auto& c, auto& n, auto& w) { c.grading = scalar<double>(n, w); }},
      {"M", [](auto& c, auto& n, auto& w) { c.M = scalar<int>(n, w); }},
      {"b", [](auto& c, auto& n, auto& w) { c.b = list<double>(n, w); }},
      {"a", [](auto& c, auto& n, auto& w) { c.a = scalar<double>(n, w); }},
      {"t_pattern", [](auto& c, auto& n, auto& w) { c.t_pattern = list<double>(n, w); }},
      {"kappa", [](auto& c, auto& n, auto& w) { c.kappa = scalar<double>(n, w); }},
      {"a_tilde", [](auto& c, auto& n, auto& w) { c.a_tilde = scalar<double>(n, w); }},
      {"r_cut", [](auto& c, auto& n, auto& w) { c.r_cut = scalar<double>(n, w); }},
      {"ladder", [](auto& c, auto& n, auto& w) { c.ladder = list<int>(n, w); }},
      {"n_ladder", [](auto& c, auto& n, auto& w) { c.n_ladder = list<int>(n, w); }},
      {"inner_nodes", [](auto& c, auto& n, auto& w) { c.inner_nodes = scalar<int>(n, w); }},
      {"samples", [](auto& c, auto& n, auto& w) { c.samples = scalar<int>(n, w); }},
      {"seed", [](auto& c, auto& n, auto& w) { c.seed = scalar<std::uint64_t>(n, w); }},
      {"jobs", [](auto& c, auto& n, auto& w) { c.jobs = scalar<int>(n, w); }},
      {"tolerances",
       [](auto& c, auto& n, auto& w) {
         if (!n.IsMap()) fail(w, "expected a table of criterion id -> bound");
         for (const auto& kv : n) {
           const auto id = kv.first.template as<std::string>();
           c.tolerances[id] = scalar<double>(kv.second, w + "." + id);
         }
       }},
  };
  return keys;
}

bool is_type(const std::string& t) {
  const auto& types = experiment_types();
  return std::any_of(types.begin(), types.end(), [&](const auto& p) { return p.first == t; });
}

ExperimentConfig parse_experiment(const std::string& name, const YAML::Node& table) {
  if (!table.IsMap() && !table.IsNull()) fail(name, "expected a table");
  std::string type = name;
  if (table.IsMap() && table["type"]) type = scalar<std::string>(table["type"], name + ".type");
  if (!is_type(type)) {
    std::string known;
    for (const auto& [t, d] : experiment_types()) known += (known.empty() ? "" : ", ") + t;
    fail(name, "unknown experiment type '" + type + "' (known: " + known + ")");
  }
  ExperimentConfig cfg = default_config(type);
  cfg.name = name;
  if (table.IsMap()) {
    for (const auto& kv : table) {
      const auto key = kv.first.as<std::string>();
      if (key == "type") continue;
      const auto it = config_keys().find(key);
      if (it == config_keys().end()) fail(name, "unknown key '" + key + "'");
      it->second(cfg, kv.second, name + "." + key);
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    fail(name, e.what());
  }
  return cfg;
}

void parse_run_table(RunManifest& m, const YAML::Node& table) {
  if (table.IsNull()) return;
  if (!table.IsMap()) fail("run", "expected a table");
  for (const auto& kv : table) {
    const auto key = kv.first.as<std::string>();
    const std::string where = "run." + key;
    if (key == "output") {
      m.output_dir = scalar<std::string>(kv.second, where);
    } else if (key == "format") {
      const auto items = list<std::string>(kv.second, where);
      std::string joined;
      for (const auto& s : items) joined += (joined.empty() ? "" : ",") + s;
      try {
        set_formats(m, joined);
      } catch (const std::invalid_argument& e) {
        fail(where, e.what());
      }
    } else if (key == "verbosity") {
      m.verbosity = scalar<int>(kv.second, where);
      if (m.verbosity < 0 || m.verbosity > 2) fail(where, "verbosity must lie in [0, 2]");
    } else {
      fail("run", "unknown key '" + key + "'");
    }
  }
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string bound_text(const Criterion& c) {
  const bool lo = std::isfinite(c.lo), hi = std::isfinite(c.hi);
  if (lo && hi) return "[" + fmt_g(c.lo) + ", " + fmt_g(c.hi) + "]";
  if (hi) return "<= " + fmt_g(c.hi);
  if (lo) return ">= " + fmt_g(c.lo);
  return "(none)";
}

/// Fails early (before any experiment runs) when the directory is unusable.
void ensure_writable(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  const auto probe = dir / ".kreinlab_write_probe";
  {
    std::ofstream f(probe);
    if (!f || !(f << "ok") || !f.flush())
      throw std::runtime_error("output directory '" + dir.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace

void set_formats(RunManifest& m, const std::string& formats) {
  bool json = false, csv = false;
  std::stringstream ss(formats);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item == "json")
      json = true;
    else if (item == "csv")
      csv = true;
    else if (!item.empty())
      throw std::invalid_argument("unknown format '" + item + "' (expected json and/or csv)");
  }
  if (!json && !csv) throw std::invalid_argument("format list is empty (expected json and/or csv)");
  m.json = json;
  m.csv = csv;
}

RunManifest parse_manifest_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(std::string("manifest: malformed document: ") + e.what());
  }
  RunManifest m;
  if (root.IsNull()) return m;
  if (!root.IsMap()) throw std::invalid_argument("manifest: top level must be a table of experiments");
  std::set<std::string> seen;
  for (const auto& kv : root) {
    const auto name = kv.first.as<std::string>();
    if (!seen.insert(name).second) fail(name, "duplicate experiment name");
    if (name == "run") {
      parse_run_table(m, kv.second);
      continue;
    }
    m.experiments.push_back(parse_experiment(name, kv.second));
  }
  return m;
}

RunManifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read manifest '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_manifest_text(ss.str());
}

int dispatch(const RunManifest& manifest, std::ostream& out, const DispatchOptions& opts) {
  ensure_writable(manifest.output_dir);

  struct Row {
    std::string name, type, status;
    int passed = 0, total = 0;
    double seconds = 0.0;
  };
  std::vector<Row> rows;
  bool all_ok = true;

  for (ExperimentConfig cfg : manifest.experiments) {
    if (opts.jobs) cfg.jobs = *opts.jobs;
    if (opts.seed) cfg.seed = *opts.seed;
    Row row{cfg.name, cfg.type, "", 0, 0, 0.0};
    ExperimentReport report;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      report = run_experiment(cfg);
    } catch (const std::exception& e) {
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      row.status = "ERROR";
      all_ok = false;
      out << "[" << cfg.name << "] error: " << e.what() << "\n";
      rows.push_back(row);
      continue;
    }
    write_outputs(report, manifest.output_dir, manifest.json, manifest.csv);
    row.seconds = report.wall_seconds;
    row.total = static_cast<int>(report.criteria.size());
    for (const auto& c : report.criteria) row.passed += c.pass ? 1 : 0;
    row.status = report.passed() ? "PASS" : "FAIL";
    all_ok = all_ok && report.passed();
    if (manifest.verbosity >= 1)
      for (const auto& c : report.criteria)
        out << "[" << cfg.name << "] " << (c.pass ? "PASS " : "FAIL ") << c.id << " = " << fmt_g(c.measured)
            << " (bound " << bound_text(c) << ")\n";
    if (manifest.verbosity >= 2)
      for (const auto& [k, v] : report.measurements) out << "[" << cfg.name << "]   " << k << " = " << fmt_g(v) << "\n";
    rows.push_back(row);
  }

  char line[160];
  std::snprintf(line, sizeof line, "%-24s %-16s %-6s %9s %10s\n", "experiment", "type", "status", "criteria",
                "seconds");
  out << line;
  for (const auto& r : rows) {
    const std::string crit = std::to_string(r.passed) + "/" + std::to_string(r.total);
    std::snprintf(line, sizeof line, "%-24s %-16s %-6s %9s %10.2f\n", r.name.c_str(), r.type.c_str(),
                  r.status.c_str(), crit.c_str(), r.seconds);
    out << line;
  }
  out << (all_ok ? "all experiments passed" : "some experiments failed") << " (" << rows.size()
      << " run, output in " << manifest.output_dir.string() << ")\n";
  return all_ok ? 0 : 1;
}

}  // namespace kreinlab
