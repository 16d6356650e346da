#include "kreinlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace kreinlab {
namespace {

using json = nlohmann::ordered_json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json config_json(const ExperimentConfig& c) {
  json tol = json::object();
  for (const auto& [k, v] : c.tolerances) tol[k] = v;
  return json{{"c0", c.c0},
              {"R", c.R},
              {"N", c.N},
              {"grading", c.grading},
              {"M", c.M},
              {"b", c.b},
              {"a", c.a},
              {"t_pattern", c.t_pattern},
              {"kappa", c.kappa},
              {"a_tilde", c.a_tilde},
              {"r_cut", c.r_cut},
              {"ladder", c.ladder},
              {"n_ladder", c.n_ladder},
              {"inner_nodes", c.inner_nodes},
              {"samples", c.samples},
              {"seed", c.seed},
              {"tolerances", tol}};
}

std::string series_file_name(const ExperimentReport& r, const spectra::SingularValueSeries& s) {
  return r.config.name + "_" + s.source + ".csv";
}

}  // namespace

std::string report_json(const ExperimentReport& r, const std::vector<std::string>& csv_files) {
  json criteria = json::array();
  for (const auto& c : r.criteria)
    criteria.push_back({{"id", c.id},
                        {"description", c.description},
                        {"measured", number_or_null(c.measured)},
                        {"lo", number_or_null(c.lo)},
                        {"hi", number_or_null(c.hi)},
                        {"pass", c.pass}});
  json measurements = json::object();
  for (const auto& [k, v] : r.measurements) measurements[k] = number_or_null(v);
  json series = json::array();
  for (std::size_t i = 0; i < r.series.size(); ++i) {
    const auto& s = r.series[i];
    json entry{{"name", s.source},
               {"length", s.size()},
               {"file", i < csv_files.size() ? json(csv_files[i]) : json(nullptr)}};
    if (s.fit)
      entry["fit"] = {{"slope", s.fit->slope},
                      {"intercept", s.fit->intercept},
                      {"constant", s.fit->constant},
                      {"residual", s.fit->residual},
                      {"l_lo", s.fit->l_lo},
                      {"l_hi", s.fit->l_hi}};
    series.push_back(std::move(entry));
  }
  json doc{{"schema_version", kReportSchemaVersion},
           {"name", r.config.name},
           {"type", r.config.type},
           {"passed", r.passed()},
           {"wall_seconds", r.wall_seconds},
           {"config", config_json(r.config)},
           {"criteria", std::move(criteria)},
           {"measurements", std::move(measurements)},
           {"series", std::move(series)}};
  return doc.dump(2) + "\n";
}

void write_csv(std::ostream& out, const spectra::SingularValueSeries& s) {
  out << "l,value,mode,multiplicity\n";
  char buf[64];
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const auto& e = s.entries[i];
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out << (i + 1) << ',' << buf << ',' << e.mode << ',' << e.multiplicity << '\n';
  }
}

WrittenFiles write_outputs(const ExperimentReport& r, const std::filesystem::path& dir, bool json_out,
                           bool csv_out) {
  WrittenFiles files;
  std::vector<std::string> names;
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
    return f;
  };
  if (csv_out) {
    for (const auto& s : r.series) {
      const std::string name = series_file_name(r, s);
      const auto path = dir / name;
      auto f = open(path);
      write_csv(f, s);
      if (!f.flush()) throw std::runtime_error("write failed for '" + path.string() + "'");
      names.push_back(name);
      files.csv.push_back(path);
    }
  }
  if (json_out) {
    files.json = dir / (r.config.name + ".json");
    auto f = open(files.json);
    f << report_json(r, names);
    if (!f.flush()) throw std::runtime_error("write failed for '" + files.json.string() + "'");
  }
  return files;
}

}  // namespace kreinlab
