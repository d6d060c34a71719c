#include "jumpdiff/io.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "jumpdiff/common.hpp"
#include "jumpdiff/grid.hpp"

namespace jumpdiff {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot open for writing: " + path);
  out << content;
  if (!out) throw ConfigurationError("write failed: " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<std::string> csv_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  return cells;
}

std::vector<std::vector<double>> read_csv_numeric(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open for reading: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    bool numeric = true;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell =
          line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric || comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (numeric && !row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

nlohmann::ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open for reading: " + path);
  nlohmann::ordered_json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ConfigurationError("invalid JSON in " + path + ": " + e.what());
  }
  return doc;
}

void write_field(const std::string& base_path, const SpaceTimeField& field,
                 const nlohmann::ordered_json& extra) {
  std::vector<double> raw;
  raw.reserve(field.values.size());
  for (const auto& v : field.values) raw.push_back(v.real());
  {
    std::ofstream out(base_path + ".f64", std::ios::binary);
    if (!out) throw ConfigurationError("cannot open for writing: " + base_path + ".f64");
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * sizeof(double)));
    if (!out) throw ConfigurationError("write failed: " + base_path + ".f64");
  }
  nlohmann::ordered_json side;
  side["format"] = "jumpdiff-field-v1";
  side["dtype"] = "float64";
  side["order"] = "level-major, spatial row-major";
  side["dim"] = field.grid.dim;
  side["half_extent"] = field.grid.half_extent;
  side["points_per_axis"] = field.grid.points_per_axis;
  side["steps"] = field.steps;
  side["t_final"] = field.t_final;
  side["count"] = raw.size();
  side["max_imag_dropped"] = field.max_imag();
  for (const auto& [key, value] : extra.items()) side[key] = value;
  write_json_file(base_path + ".json", side);
}

SpaceTimeField read_field(const std::string& base_path) {
  const nlohmann::ordered_json side = read_json_file(base_path + ".json");
  if (!side.contains("format") || side["format"] != "jumpdiff-field-v1")
    throw ConfigurationError("not a field sidecar: " + base_path + ".json");
  const GridSpec grid(side.at("dim").get<int>(), side.at("half_extent").get<double>(),
                      side.at("points_per_axis").get<int>());
  SpaceTimeField field(grid, side.at("steps").get<int>(), side.at("t_final").get<double>());
  std::ifstream in(base_path + ".f64", std::ios::binary);
  if (!in) throw ConfigurationError("cannot open for reading: " + base_path + ".f64");
  std::vector<double> raw(field.values.size());
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(raw.size() * sizeof(double)))
    throw ConfigurationError("field data truncated: " + base_path + ".f64");
  for (std::size_t i = 0; i < raw.size(); ++i) field.values[i] = raw[i];
  return field;
}

void write_kernel_snapshot(const std::string& base_path, const KernelSnapshot& snap) {
  std::vector<double> raw;
  raw.reserve(snap.values.size());
  for (const auto& v : snap.values) raw.push_back(v.real());
  {
    std::ofstream out(base_path + ".f64", std::ios::binary);
    if (!out) throw ConfigurationError("cannot open for writing: " + base_path + ".f64");
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * sizeof(double)));
    if (!out) throw ConfigurationError("write failed: " + base_path + ".f64");
  }
  nlohmann::ordered_json side;
  side["format"] = "jumpdiff-kernel-v1";
  side["dtype"] = "float64";
  side["order"] = "spatial row-major";
  side["which"] = kernel_which_name(snap.which);
  side["axis"] = snap.axis;
  side["s"] = snap.s;
  side["t"] = snap.t;
  side["scaling"] = snap.scaling;
  side["symbol"] = snap.symbol;
  side["dim"] = snap.grid.dim;
  side["half_extent"] = snap.grid.half_extent;
  side["points_per_axis"] = snap.grid.points_per_axis;
  side["mass"] = snap.mass();
  side["max_abs"] = snap.max_abs();
  side["max_imag_dropped"] = snap.max_imag();
  write_json_file(base_path + ".json", side);
}

void write_kernel_csv(const std::string& path, const KernelSnapshot& snap) {
  std::vector<std::string> header;
  for (int i = 0; i < snap.grid.dim; ++i) header.push_back("x" + std::to_string(i + 1));
  header.push_back("value");
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<std::size_t>(snap.grid.total_points()));
  std::array<double, 3> x{};
  for (long flat = 0; flat < snap.grid.total_points(); ++flat) {
    snap.grid.coordinate_at(flat, x);
    std::vector<double> row;
    for (int i = 0; i < snap.grid.dim; ++i) row.push_back(x[static_cast<std::size_t>(i)]);
    row.push_back(snap.values[static_cast<std::size_t>(flat)].real());
    rows.push_back(csv_row(row));
  }
  write_csv(path, header, rows);
}

}  // namespace jumpdiff
