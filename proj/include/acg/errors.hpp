#pragma once

#include <stdexcept>
#include <string>

namespace acg {

// Every thrown error carries a short machine-readable category that the CLI
// maps to an exit code.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& msg)
      : std::runtime_error(category + ": " + msg), category_(std::move(category)) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error("config", msg) {}
};
struct NumericsError : Error {
  explicit NumericsError(const std::string& msg) : Error("numerics", msg) {}
};
struct IoError : Error {
  explicit IoError(const std::string& msg) : Error("io", msg) {}
};

}  // namespace acg
