#include "fracthird/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracthird::io {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void emit(std::ostream& os, const json& j, int indent, int level) {
    const bool pretty = indent >= 0;
    auto newline = [&](int lvl) {
        if (pretty) os << '\n' << std::string(static_cast<std::size_t>(indent * lvl), ' ');
    };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ',';
                first = false;
                newline(level + 1);
                os << json(it.key()).dump() << (pretty ? ": " : ":");
                emit(os, it.value(), indent, level + 1);
            }
            newline(level);
            os << '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) os << ',';
                first = false;
                newline(level + 1);
                emit(os, v, indent, level + 1);
            }
            newline(level);
            os << ']';
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (std::isfinite(v))
                os << format_double(v);
            else
                os << '"' << format_double(v) << '"';
            return;
        }
        default: os << j.dump();
    }
}

std::string csv_cell(const json& c) {
    if (c.is_number_float()) return format_double(c.get<double>());
    if (c.is_string()) {
        const auto s = c.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    if (c.is_boolean()) return c.get<bool>() ? "true" : "false";
    if (c.is_null()) return "";
    return c.dump();
}

}  // namespace

void write_json(std::ostream& os, const json& j, int indent) { emit(os, j, indent, 0); }

std::string dump_json(const json& j, int indent) {
    std::ostringstream os;
    write_json(os, j, indent);
    return os.str();
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<json>& cells) {
    if (cells.size() != header_.size()) throw std::invalid_argument("csv row width does not match header");
    rows_.push_back(cells);
}

void CsvTable::write(std::ostream& os) const {
    for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
    os << '\n';
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
        os << '\n';
    }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << content;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
    std::ostringstream os;
    for (const auto& r : records) {
        write_json(os, r, -1);
        os << '\n';
    }
    write_file(path, os.str());
}

std::uint64_t plan_hash(const json& plan) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump_json(plan, -1)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace fracthird::io
