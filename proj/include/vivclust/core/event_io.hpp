#pragma once

#include "vivclust/core/types.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace vivclust {

nlohmann::json to_json(const TimeSeries& ts);
TimeSeries time_series_from_json(const nlohmann::json& j);

// Gaps are written as null.
nlohmann::json to_json(const CurrentProfile& profile);
CurrentProfile current_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MeasurementEvent& event);
MeasurementEvent event_from_json(const nlohmann::json& j);

MeasurementEvent read_event(const std::filesystem::path& path);
void write_event(const MeasurementEvent& event, const std::filesystem::path& path);

// Every *.json in dir, sorted by file name.
std::vector<std::filesystem::path> list_event_files(const std::filesystem::path& dir);

// Writes to a sibling temp file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace vivclust
