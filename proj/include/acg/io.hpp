#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace acg::io {

// Columnar text table: '#'-prefixed header lines carry key/value metadata,
// one '# columns:' line names the columns, data rows are %.17g doubles.
struct Table {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // data[c][row]

  const std::vector<double>& col(const std::string& name) const;
};

void write_table(const std::filesystem::path& path, const Table& t);
Table read_table(const std::filesystem::path& path);

std::string format_double(double v);  // round-trip exact

std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t checksum_file(const std::filesystem::path& path);

}  // namespace acg::io
