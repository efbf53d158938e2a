#include "halfcell/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace halfcell {

namespace {

std::ofstream open_or_throw(const std::string& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  auto out = open_or_throw(path, std::ios::out | std::ios::trunc);
  out << content;
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string format_double(double v) {
  char buf[32];
  // shortest representation that round-trips
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto out = open_or_throw(path, std::ios::out | std::ios::trunc);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 == header.size() ? "\n" : ",");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << format_double(row[i]) << (i + 1 == row.size() ? "\n" : ",");
  }
}

void write_grid_csv(const std::string& path, const TorusGrid& grid, const GridFn& u) {
  std::vector<std::string> header;
  for (int d = 1; d <= grid.dim; ++d) header.push_back("y" + std::to_string(d));
  header.push_back("value");
  std::vector<std::vector<double>> rows;
  rows.reserve(u.size());
  for (int i = 0; i < grid.num_nodes(); ++i) {
    VectorXd y = grid.point(i);
    std::vector<double> row(y.data(), y.data() + y.size());
    row.push_back(u[i]);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

void write_grid_csv(const std::string& path, const StripGrid& grid, const GridFn& u) {
  std::vector<std::string> header;
  for (int d = 1; d <= grid.dim; ++d) header.push_back("y" + std::to_string(d));
  header.push_back("value");
  std::vector<std::vector<double>> rows;
  rows.reserve(u.size());
  for (int i = 0; i < grid.num_nodes(); ++i) {
    VectorXd y = grid.point(i);
    std::vector<double> row(y.data(), y.data() + y.size());
    row.push_back(u[i]);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

void write_grid_binary(const std::string& path, const std::vector<int>& dims,
                       const GridFn& u) {
  static_assert(std::endian::native == std::endian::little,
                "binary grid dumps assume a little-endian host");
  auto out = open_or_throw(path, std::ios::out | std::ios::trunc | std::ios::binary);
  const std::int32_t rank = static_cast<std::int32_t>(dims.size());
  out.write(reinterpret_cast<const char*>(&rank), sizeof(rank));
  for (int d : dims) {
    const std::int32_t v = d;
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  out.write(reinterpret_cast<const char*>(u.data()),
            static_cast<std::streamsize>(u.size() * sizeof(double)));
}

}  // namespace halfcell
