#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "jumpdiff/field.hpp"
#include "jumpdiff/kernels.hpp"

namespace jumpdiff {

// Shortest stable decimal form used in every CSV cell (%.12g).
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

// Rows of preformatted cells; the writer adds no quoting, callers keep cells
// comma-free.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::vector<std::string> csv_row(const std::vector<double>& values);

// Numeric CSV reader: skips rows with non-numeric cells (headers), returns
// the rest.
std::vector<std::vector<double>> read_csv_numeric(const std::string& path);

void write_json_file(const std::string& path, const nlohmann::ordered_json& doc);
nlohmann::ordered_json read_json_file(const std::string& path);

// Space-time fields are stored as <base>.f64 (row-major float64, level-major,
// real part) plus <base>.json describing the mesh. extra entries are merged
// into the sidecar.
void write_field(const std::string& base_path, const SpaceTimeField& field,
                 const nlohmann::ordered_json& extra = nlohmann::ordered_json::object());
SpaceTimeField read_field(const std::string& base_path);

// Kernel snapshots use the same dump format with kernel metadata in the
// sidecar, plus a one-row-per-point CSV export.
void write_kernel_snapshot(const std::string& base_path, const KernelSnapshot& snap);
void write_kernel_csv(const std::string& path, const KernelSnapshot& snap);

}  // namespace jumpdiff
