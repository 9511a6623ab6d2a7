#include "acg/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "acg/errors.hpp"

namespace acg::io {

const std::vector<double>& Table::col(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return data[i];
  throw IoError("no such column: " + name);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_table(const std::filesystem::path& path, const Table& t) {
  std::ostringstream os;
  for (const auto& [k, v] : t.meta) os << "# " << k << " = " << v << "\n";
  os << "# columns:";
  for (const auto& c : t.columns) os << " " << c;
  os << "\n";
  std::size_t rows = t.data.empty() ? 0 : t.data[0].size();
  for (const auto& c : t.data)
    if (c.size() != rows) throw IoError("ragged table");
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < t.data.size(); ++c)
      os << (c ? " " : "") << format_double(t.data[c][r]);
    os << "\n";
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << os.str();
  if (!f) throw IoError("write failed: " + path.string());
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path.string());
  Table t;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (body.rfind(" columns:", 0) == 0) {
        std::istringstream is(body.substr(9));
        std::string name;
        while (is >> name) {
          t.columns.push_back(name);
          t.data.emplace_back();
        }
      } else {
        auto eq = body.find('=');
        if (eq != std::string::npos) {
          auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
          };
          t.meta[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
        }
      }
      continue;
    }
    std::istringstream is(line);
    double v;
    std::size_t c = 0;
    while (is >> v) {
      if (c >= t.data.size()) throw IoError("row wider than header: " + path.string());
      t.data[c++].push_back(v);
    }
  }
  return t;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t checksum_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return fnv1a64(os.str());
}

}  // namespace acg::io
