#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace dv {

// Decimal with 17 significant digits (round-trip exact for binary64).
std::string format_double(double x);

// Writes a CSV file with LF line endings; rows must match the header width.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);

// UTF-8 JSON with sorted keys, two-space indent and a trailing newline.
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

void ensure_directory(const std::string& path);

}  // namespace dv
