#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "halfcell/grid.hpp"

namespace halfcell {

using json = nlohmann::json;

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const json& j);

// Deterministic shortest round-trip formatting for CSV cells.
std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_grid_csv(const std::string& path, const TorusGrid& grid, const GridFn& u);
void write_grid_csv(const std::string& path, const StripGrid& grid, const GridFn& u);

// int32 rank, int32 extents, row-major float64 payload; little-endian.
void write_grid_binary(const std::string& path, const std::vector<int>& dims,
                       const GridFn& u);

}  // namespace halfcell
