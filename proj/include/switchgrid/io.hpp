#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "switchgrid/grid.hpp"
#include "switchgrid/model.hpp"
#include "switchgrid/simulate.hpp"

// Artifact formats. Everything written here is deterministic: no timestamps,
// doubles printed with %.17g (round-trip exact), JSON keys sorted. Writes go
// through a temp file plus rename so readers never see a partial artifact.
namespace switchgrid::io {

std::string format_double(double v);

void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

// Value field as CSV rows (t, x_1..x_d, regime, value) in level-major order,
// regimes 1-based, plus a sidecar <csv>.meta.json describing the grid.
std::string field_csv(const ValueField& field);
nlohmann::json field_meta(const ValueField& field);
void write_field(const std::filesystem::path& csv_path, const ValueField& field);

// Rebuilds the grid from the sidecar and refills the field from the CSV.
// Row order, times, regimes and node coordinates are all checked.
ValueField read_field(const std::filesystem::path& csv_path, const ModelSpec& spec);

// Path traces as CSV rows (path_id, t, x_1..x_d, regime, event).
std::string paths_csv(const std::vector<std::vector<TraceRow>>& traces, int dim);

} // namespace switchgrid::io
