#pragma once

#include "maglap/geometry.hpp"
#include "maglap/polynomial.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace maglap::cli {

inline constexpr const char* kSchema = "maglap-config/1";
inline constexpr const char* kCsvStamp = "# maglap-csv/1";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses sums of products of numbers, x1..xd, powers and parentheses.
Polynomial parse_polynomial(const std::string& text, std::size_t dim);

struct RunConfig {
  std::string command;
  PolyMatrixField field;
  std::optional<DomainSpec> domain;
  nlohmann::json task = nlohmann::json::object();
  std::string out_dir = ".";
  std::uint64_t seed = 0x5eed;
  std::size_t threads = 1;
};

/// Validates the whole document; the task block is checked per command.
RunConfig parse_config(const std::string& text, const std::string& command);

/// Entry point shared by the executable and the tests. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace maglap::cli
