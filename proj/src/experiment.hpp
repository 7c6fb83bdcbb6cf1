#pragma once

#include "grid.hpp"

#include <json.hpp>
#include <string>

namespace prlab {

constexpr const char* kVersion = "0.1.0";

/// Every key with its default; run() prints this merged with the user file into the manifest.
nlohmann::json default_config();
/// Merges the user document over the defaults and validates it (unknown keys are parse errors).
nlohmann::json resolve_config(const nlohmann::json& user);
nlohmann::json load_config(const std::string& path);

std::string sha256_hex(const std::string& bytes);
/// Hash of the resolved config as serialized into config.resolved.json.
std::string config_hash(const nlohmann::json& resolved);

struct RunSummary {
    nlohmann::json ledger;  // array of {module, op, check, passed, detail}
    nlohmann::json manifest;
    bool passed = false;
};

/// Full pipeline: constants, optional sweep, solve or sample, fields, survival, singular set.
RunSummary run_experiment(const nlohmann::json& config, const std::string& out_dir, int threads = 1);

// Single-step commands behind the CLI subcommands and the C API.

GridFunction solve_command(const nlohmann::json& problem, int threads = 1);
nlohmann::json constants_command(const nlohmann::json& request);
nlohmann::json theta_command(const GridFunction& u, const nlohmann::json& request, const std::string& csv_path,
                             int threads = 1);
nlohmann::json psi_command(const GridFunction& u, const nlohmann::json& request, const std::string& csv_path,
                           int threads = 1);
nlohmann::json akappa_command(const GridFunction& u, const nlohmann::json& request, GridFunction* mask);
nlohmann::json barrier_command(const nlohmann::json& request);
nlohmann::json dimension_command(const nlohmann::json& request, const std::string& csv_path);

}  // namespace prlab
