#pragma once

/** @file
 * Subcommand implementations behind the mmlreg executable. Each command
 * returns a JSON document; tables are rendered from that document so a saved
 * report re-renders to the same text.
 */

#include "mmlreg/core.hpp"
#include "mmlreg/criteria.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mmlreg::cli
{

struct CliConfig
{
    std::string subcommand;
    std::filesystem::path data;
    std::string target = "medv";
    SearchScheme scheme = SearchScheme::AllSubsets;
    /// Size of the JS-equidistant grid; ignored when dof_values is set.
    int dof_grid = 4;
    /// Explicit grid, e.g. "1,1.9,5,inf".
    std::optional<std::string> dof_values;
    Criterion criterion = Criterion::MML;
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> out;
    unsigned workers = 0;
    std::optional<std::size_t> replications;

    // fit
    std::string columns = "all";
    std::string nu = "inf";
    std::string method = "mml";

    // select
    std::size_t top = 20;

    // simulate
    std::string true_nu = "5";
    std::string sparsity = "sparse";
    std::string signal = "strong";
    bool all_configs = false;
    std::size_t n_test = 10000;
    std::vector<std::string> criteria{"mml", "bic", "aicc"};
    std::string kl_mode = "empirical";

    // boston-cv
    std::size_t splits = 50;
};

nlohmann::json cmd_fit(const CliConfig& config);
nlohmann::json cmd_select(const CliConfig& config);
nlohmann::json cmd_posterior(const CliConfig& config);
nlohmann::json cmd_simulate(const CliConfig& config);
nlohmann::json cmd_boston_cv(const CliConfig& config);

/// Dispatches on config.subcommand.
nlohmann::json run_command(const CliConfig& config);

/// Plain-text table for any report produced above (dispatches on its "command" field).
std::string render(const nlohmann::json& report);

/// Fixed four-decimal formatting used in every table.
std::string format_number(double value);

} // namespace mmlreg::cli
