#pragma once

// CSV and JSON serialization of experiment reports.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "relmotion/harness.hpp"

namespace relmotion {

inline constexpr const char* kCsvHeader = "t_ns,p_e,sigma_z,n_ph,purity,trace_dev";

/// Header plus one row per sample, times in ns, values with 17 significant digits.
std::string csv_text(const LabeledSeries& s);
void write_csv(const LabeledSeries& s, const std::filesystem::path& path);

nlohmann::json to_json(const Check& c);
nlohmann::json to_json(const PerturbativeResult& r);
nlohmann::json to_json(const ExperimentReport& r);

struct SeriesFile {
  std::filesystem::path path;
  const LabeledSeries* series = nullptr;
};

/// Output file for every series in the report (rows included). A report with a
/// single unlabeled series maps to `csv_path` itself; otherwise each series gets
/// `<stem>_<label><ext>`, with row labels prepended.
std::vector<SeriesFile> csv_layout(const ExperimentReport& r, const std::filesystem::path& csv_path);

/// Writes the CSV files (when csv_path is set) and the JSON report (when
/// json_path is set). Returns the written paths. Throws IoError.
std::vector<std::filesystem::path> emit(const ExperimentReport& r, const OutputConfig& out);

}  // namespace relmotion
