#include "relmotion/report_io.hpp"

#include <cstdio>
#include <fstream>

namespace relmotion {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

json series_summary(const LabeledSeries& s) {
  const SimResult& r = s.result;
  json j = {{"label", s.label},
            {"samples", r.size()},
            {"max_norm_drift", r.max_norm_drift},
            {"min_eigenvalue", r.min_eigenvalue},
            {"max_hermiticity_error", r.max_hermiticity_error},
            {"stopped_early", r.stopped_early}};
  if (r.size() > 0) {
    const Observables last = r.at(r.size() - 1);
    j["t_end_ns"] = r.times.back() * s.ns_per_time_unit;
    j["final"] = {{"p_e", last.p_e},
                  {"sigma_z", last.sigma_z},
                  {"n_ph", last.n_ph},
                  {"purity", last.purity},
                  {"trace_dev", last.trace_dev}};
  }
  return j;
}

void collect(const ExperimentReport& r, const std::string& prefix,
             std::vector<std::pair<std::string, const LabeledSeries*>>& out) {
  auto join = [](const std::string& a, const std::string& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return a + "_" + b;
  };
  for (const auto& s : r.series) out.emplace_back(join(prefix, s.label), &s);
  for (const auto& row : r.rows) collect(row, join(prefix, row.label), out);
}

}  // namespace

std::string csv_text(const LabeledSeries& s) {
  const SimResult& r = s.result;
  std::string out = kCsvHeader;
  out += '\n';
  out.reserve(out.size() + r.size() * 6 * 24);
  for (std::size_t i = 0; i < r.size(); ++i) {
    append_number(out, r.times[i] * s.ns_per_time_unit);
    for (double v : {r.p_e[i], r.sigma_z[i], r.n_ph[i], r.purity[i], r.trace_dev[i]}) {
      out += ',';
      append_number(out, v);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const LabeledSeries& s, const fs::path& path) { write_text(path, csv_text(s)); }

json to_json(const Check& c) {
  json j = {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}};
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

json to_json(const PerturbativeResult& r) {
  return {{"r_em", r.r_em},
          {"r_abs", r.r_abs},
          {"sigma_z_pert", r.sigma_z_pert},
          {"n_pert", r.n_pert},
          {"weak_coupling", r.weak_coupling}};
}

json to_json(const ExperimentReport& r) {
  json j;
  j["scenario"] = r.scenario;
  if (!r.label.empty()) j["label"] = r.label;
  j["config"] = r.config.to_json();
  j["parameters"] = r.parameters;
  j["all_passed"] = r.all_passed();
  j["checks"] = json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
  j["series"] = json::array();
  for (const auto& s : r.series) j["series"].push_back(series_summary(s));
  j["perturbative"] = json::array();
  for (const auto& p : r.perturbative) {
    json e = to_json(p.result);
    e["label"] = p.label;
    j["perturbative"].push_back(e);
  }
  if (!r.rows.empty()) {
    j["rows"] = json::array();
    for (const auto& row : r.rows) j["rows"].push_back(to_json(row));
  }
  j["wall_seconds"] = r.wall_seconds;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

std::vector<SeriesFile> csv_layout(const ExperimentReport& r, const fs::path& csv_path) {
  std::vector<std::pair<std::string, const LabeledSeries*>> all;
  collect(r, "", all);
  std::vector<SeriesFile> out;
  if (all.size() == 1 && all.front().first.empty()) {
    out.push_back({csv_path, all.front().second});
    return out;
  }
  const fs::path dir = csv_path.parent_path();
  const std::string stem = csv_path.stem().string();
  const std::string ext = csv_path.extension().string();
  for (const auto& [name, s] : all) {
    const std::string file = name.empty() ? stem + ext : stem + "_" + name + ext;
    out.push_back({dir / file, s});
  }
  return out;
}

std::vector<fs::path> emit(const ExperimentReport& r, const OutputConfig& out) {
  std::vector<fs::path> written;
  if (!out.csv_path.empty()) {
    for (const auto& f : csv_layout(r, out.csv_path)) {
      write_csv(*f.series, f.path);
      written.push_back(f.path);
    }
  }
  if (!out.json_path.empty()) {
    write_text(out.json_path, to_json(r).dump(2) + "\n");
    written.push_back(out.json_path);
  }
  return written;
}

}  // namespace relmotion
