#pragma once

// Config-driven front end. One command per invocation; each command returns a
// machine-readable result, a CSV table and a short text summary.

#include "worldfn/config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace worldfn::cli {

const std::vector<std::string>& commands();

struct Overrides {
  std::optional<double> tolerance;
  std::optional<std::size_t> grid;
  std::optional<std::uint64_t> seed;
};

struct CommandResult {
  Json json;
  std::vector<std::vector<std::string>> table;  // first row is the header
  std::string summary;
  bool failed = false;  // verify: some pass/fail check failed
};

// `config` is the parsed experiment config; relative paths resolve against
// `base_dir`.
CommandResult execute(const std::string& command, const Json& config,
                      const std::filesystem::path& base_dir, const Overrides& overrides = {});

// Full command line: worldfn <command> --config F [--out F] [--format csv|json]
// [--tol X] [--grid N] [--seed N]. Returns 0, 1 (invalid input) or 2 (solver
// failure).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace worldfn::cli
