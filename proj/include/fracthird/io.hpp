#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fracthird::io {

using json = nlohmann::json;

// Shortest fixed-width rendering used everywhere: 17 significant digits; non-finite values as inf / -inf / nan.
std::string format_double(double v);

// JSON serialization with every floating-point value at 17 significant digits. Non-finite numbers are written as
// the strings "inf", "-inf" and "nan". indent < 0 gives a single line.
void write_json(std::ostream& os, const json& j, int indent = 2);
std::string dump_json(const json& j, int indent = 2);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(const std::vector<json>& cells);
    std::size_t rows() const { return rows_.size(); }
    void write(std::ostream& os) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<json>> rows_;
};

void write_file(const std::filesystem::path& path, const std::string& content);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

// FNV-1a over the canonical compact dump.
std::uint64_t plan_hash(const json& plan);

}  // namespace fracthird::io
