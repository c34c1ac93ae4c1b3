#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace nld {

/// Command-line overrides applied on top of a run configuration.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

struct Artifacts {
    nlohmann::json report;
    std::string csv;  ///< empty when the pipeline has no tabular output
};

std::vector<std::string> subcommands();

/// Executes one pipeline (solve, kernel, dini-check, counterexample, exit-sim) on a JSON
/// configuration. Unknown keys and malformed values raise std::invalid_argument;
/// numerical failures surface as std::runtime_error subclasses. The report echoes the
/// configuration and carries no timestamps, so equal inputs give equal bytes.
Artifacts run(const std::string& subcommand, const nlohmann::json& config, const Overrides& overrides = {});

}  // namespace nld
