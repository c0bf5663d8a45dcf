#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace adiawkb {

// Shortest round-trip decimal form; byte-identical across runs.
std::string double_str(double v);

std::uint64_t fnv1a_hash(std::string_view s);
std::string hash_hex(std::string_view s);

void write_text_file(const std::string& path, const std::string& content);

// CSV with leading comment rows (tool version + config hash) and a header
// row; all numeric cells go through double_str.
class CsvBuilder {
  public:
    explicit CsvBuilder(std::vector<std::string> columns);

    void set_stamp(const std::string& config_hash);
    void add_row(const std::vector<std::string>& cells);
    void add_row(const std::vector<double>& cells);

    std::string str() const;
    void write(const std::string& path) const;

  private:
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
    std::string stamp_;
};

} // namespace adiawkb
