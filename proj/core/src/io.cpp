#include "adiawkb/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "adiawkb/version.hpp"

namespace adiawkb {

std::string double_str(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a_hash(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::string_view s) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a_hash(s)));
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
}

CsvBuilder::CsvBuilder(std::vector<std::string> columns)
    : columns_(std::move(columns)) {}

void CsvBuilder::set_stamp(const std::string& config_hash) {
    stamp_ = "# adiawkb " + std::string(version_string) +
             " config_hash=" + config_hash + "\n";
}

void CsvBuilder::add_row(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ',';
        row += cells[i];
    }
    rows_.push_back(std::move(row));
}

void CsvBuilder::add_row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double c : cells) s.push_back(double_str(c));
    add_row(s);
}

std::string CsvBuilder::str() const {
    std::string out = stamp_;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (const std::string& r : rows_) {
        out += r;
        out += '\n';
    }
    return out;
}

void CsvBuilder::write(const std::string& path) const {
    write_text_file(path, str());
}

} // namespace adiawkb
