#include "mmlreg/cli/commands.hpp"

#include "mmlreg/distributions.hpp"
#include "mmlreg/estimation.hpp"
#include "mmlreg/search.hpp"
#include "mmlreg/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace mmlreg::cli
{

using nlohmann::json;

namespace
{

json dof_json(Dof nu)
{
    if (nu.is_gaussian())
        return "inf";
    return nu.value();
}

/// JSON has no infinity; non-finite values become null.
json number_json(double v)
{
    if (std::isfinite(v))
        return v;
    return nullptr;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

std::vector<Dof> resolve_grid(const CliConfig& config)
{
    if (config.dof_values)
    {
        std::vector<Dof> grid;
        for (const auto& token : split_list(*config.dof_values))
            grid.push_back(parse_dof(token));
        if (grid.empty())
            throw InputError("--dof-values is empty");
        return grid;
    }
    if (config.dof_grid < 1)
        throw InputError("--dof-grid must be >= 1");
    if (config.dof_grid == 1)
        return {Dof::gaussian()};
    return build_dof_grid(config.dof_grid).values;
}

json dataset_json(const CliConfig& config, const Dataset& data)
{
    return {{"path", config.data.string()},
            {"target", data.target()},
            {"n", data.n()},
            {"q", data.q()},
            {"predictors", data.names()}};
}

std::vector<std::string> structure_names(const Dataset& data, const ModelStructure& s)
{
    std::vector<std::string> out;
    for (std::size_t j : s.gamma())
        out.push_back(data.names()[j]);
    return out;
}

json breakdown_json(const CodelengthBreakdown& b)
{
    return {{"assertion_beta", b.assertion_beta},
            {"assertion_scale", b.assertion_scale},
            {"detail", b.detail},
            {"hyper_k", b.hyper_k},
            {"structure", b.structure},
            {"total", b.total()}};
}

json params_json(const TParams& params)
{
    return {{"beta0", params.beta0},
            {"beta", std::vector<double>(params.beta.data(), params.beta.data() + params.beta.size())},
            {"tau", params.tau},
            {"nu", dof_json(params.nu)}};
}

Dataset load(const CliConfig& config)
{
    if (config.data.empty())
        throw InputError("--data is required");
    return load_dataset(config.data, config.target);
}

std::vector<Criterion> parse_criteria(const std::vector<std::string>& names)
{
    std::vector<Criterion> out;
    for (const auto& name : names)
        for (const auto& token : split_list(name))
            out.push_back(parse_criterion(token));
    if (out.empty())
        throw InputError("no criteria given");
    return out;
}

json summary_json(const CriterionSummary& s, const std::vector<Dof>& grid)
{
    auto metrics = [](const Metrics& m) {
        return json{{"empirical_kl", m.empirical_kl},
                    {"mae", m.mae},
                    {"false_positives", m.false_positives},
                    {"false_negatives", m.false_negatives}};
    };
    std::vector<double> kl, mae, fp, fn;
    for (const auto& m : s.per_replication)
    {
        kl.push_back(m.empirical_kl);
        mae.push_back(m.mae);
        fp.push_back(m.false_positives);
        fn.push_back(m.false_negatives);
    }
    json counts = json::object();
    for (std::size_t k = 0; k < grid.size(); ++k)
        counts[to_string(grid[k])] = s.dof_counts[k];
    return {{"criterion", to_string(s.criterion)},
            {"mean", metrics(s.mean)},
            {"std_error", metrics(s.std_error)},
            {"per_replication",
             {{"empirical_kl", kl}, {"mae", mae}, {"false_positives", fp}, {"false_negatives", fn}}},
            {"dof_selected", counts}};
}

} // namespace

json cmd_fit(const CliConfig& config)
{
    const Dataset data = load(config);
    std::vector<std::size_t> indices;
    if (config.columns == "all")
    {
        indices.resize(data.q());
        std::iota(indices.begin(), indices.end(), std::size_t{0});
    }
    else if (config.columns != "none")
    {
        for (const auto& name : split_list(config.columns))
            indices.push_back(data.column_index(name));
    }
    const ModelStructure structure = ModelStructure::subset(std::move(indices));
    const Dof nu = parse_dof(config.nu);
    const StructureCodingScheme coding(config.scheme, std::max<std::size_t>(data.q(), 1));

    FitResult fit;
    if (config.method == "mml")
        fit = mml_fit(data, structure, nu, EMConfig{}, coding);
    else if (config.method == "ml")
        fit = ml_fit(data, structure, nu, EMConfig{});
    else
        throw InputError("unknown method '" + config.method + "' (expected mml|ml)");

    json out{{"command", "fit"},
             {"dataset", dataset_json(config, data)},
             {"method", config.method},
             {"scheme", to_string(config.scheme)},
             {"predictors", structure_names(data, structure)},
             {"params", params_json(fit.params)},
             {"K", fit.K.value},
             {"objective", fit.objective},
             {"iterations", fit.iterations},
             {"converged", fit.converged}};
    if (fit.breakdown)
        out["breakdown"] = breakdown_json(*fit.breakdown);
    return out;
}

json cmd_select(const CliConfig& config)
{
    const Dataset data = load(config);
    const auto structures = enumerate_structures(data.q(), config.scheme);
    const auto grid = resolve_grid(config);
    SelectOptions options;
    options.workers = config.workers;
    const SelectionReport report = select(data, structures, grid, config.criterion,
                                          StructureCodingScheme(config.scheme, data.q()), options);

    json ranked = json::array();
    for (std::size_t r = 0; r < report.ranked.size(); ++r)
    {
        const auto& c = report.ranked[r];
        json entry{{"rank", r + 1},
                   {"predictors", structure_names(data, c.structure)},
                   {"p", c.structure.size()},
                   {"nu", dof_json(c.nu)},
                   {"score", c.score},
                   {"params", params_json(c.fit.params)}};
        if (c.breakdown)
            entry["breakdown"] = breakdown_json(*c.breakdown);
        ranked.push_back(std::move(entry));
    }
    json grid_json = json::array();
    for (Dof nu : grid)
        grid_json.push_back(dof_json(nu));
    json marginals = json::object();
    for (std::size_t j = 0; j < data.q(); ++j)
        marginals[data.names()[j]] = report.marginal_inclusion[j];

    return {{"command", "select"},
            {"dataset", dataset_json(config, data)},
            {"scheme", to_string(config.scheme)},
            {"criterion", to_string(config.criterion)},
            {"dof_grid", grid_json},
            {"top", config.top},
            {"candidates", report.ranked.size() + report.failures},
            {"failures", report.failures},
            {"warnings", report.warnings},
            {"marginal_inclusion", marginals},
            {"ranked", ranked}};
}

json cmd_posterior(const CliConfig& config)
{
    const Dataset data = load(config);
    const auto structures = enumerate_structures(data.q(), config.scheme);
    const auto grid = resolve_grid(config);
    SelectOptions options;
    options.workers = config.workers;
    const SelectionReport report = select(data, structures, grid, Criterion::MML,
                                          StructureCodingScheme(config.scheme, data.q()), options);

    std::vector<std::size_t> order(data.q());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return report.marginal_inclusion[a] < report.marginal_inclusion[b];
    });
    json marginals = json::array();
    for (std::size_t j : order)
        marginals.push_back({{"predictor", data.names()[j]}, {"probability", report.marginal_inclusion[j]}});

    std::vector<std::size_t> by_mass(structures.size());
    std::iota(by_mass.begin(), by_mass.end(), std::size_t{0});
    std::stable_sort(by_mass.begin(), by_mass.end(), [&](std::size_t a, std::size_t b) {
        return report.posteriors[a] > report.posteriors[b];
    });
    json models = json::array();
    for (std::size_t i : by_mass)
        models.push_back({{"predictors", structure_names(data, structures[i])},
                          {"codelength", number_json(report.structure_scores[i])},
                          {"posterior", report.posteriors[i]}});

    json grid_json = json::array();
    for (Dof nu : grid)
        grid_json.push_back(dof_json(nu));
    return {{"command", "posterior"},
            {"dataset", dataset_json(config, data)},
            {"scheme", to_string(config.scheme)},
            {"dof_grid", grid_json},
            {"best_codelength", report.best().score},
            {"failures", report.failures},
            {"marginal_inclusion", marginals},
            {"models", models}};
}

json cmd_simulate(const CliConfig& config)
{
    const auto criteria = parse_criteria(config.criteria);
    KlMode mode = KlMode::Empirical;
    if (config.kl_mode == "quadrature")
        mode = KlMode::Quadrature;
    else if (config.kl_mode != "empirical")
        throw InputError("unknown --kl-mode '" + config.kl_mode + "' (expected empirical|quadrature)");

    struct Cell
    {
        std::string nu, sparsity, signal;
    };
    std::vector<Cell> cells;
    if (config.all_configs)
    {
        for (const char* nu : {"1", "5", "inf"})
            for (const char* sparsity : {"dense", "balanced", "sparse"})
                for (const char* signal : {"weak", "moderate", "strong"})
                    cells.push_back({nu, sparsity, signal});
    }
    else
    {
        cells.push_back({config.true_nu, config.sparsity, config.signal});
    }

    json results = json::array();
    for (std::size_t c = 0; c < cells.size(); ++c)
    {
        SimConfig sim;
        sim.true_nu = parse_dof(cells[c].nu);
        sim.support_size = support_size_for(cells[c].sparsity);
        sim.signal = signal_for(cells[c].signal);
        sim.n_test = config.n_test;
        sim.replications = config.replications.value_or(100);
        // In a batch each cell gets its own stream so any cell can be rerun alone.
        sim.seed = config.all_configs ? Rng(config.seed).substream(c).seed() : config.seed;
        sim.kl_mode = mode;
        const ExperimentResult result = run_experiment(sim, criteria, config.workers);

        json per_criterion = json::array();
        for (const auto& s : result.criteria)
            per_criterion.push_back(summary_json(s, result.dof_grid));
        results.push_back({{"config",
                            {{"true_nu", dof_json(sim.true_nu)},
                             {"sparsity", cells[c].sparsity},
                             {"signal", cells[c].signal},
                             {"support_size", sim.support_size},
                             {"beta", sim.signal},
                             {"n_train", sim.n_train},
                             {"n_test", sim.n_test},
                             {"q", sim.q},
                             {"rho", sim.rho},
                             {"true_tau", sim.true_tau},
                             {"replications", sim.replications},
                             {"seed", sim.seed},
                             {"kl_mode", config.kl_mode}}},
                           {"failed_replications", result.failed_replications},
                           {"warnings", result.warnings},
                           {"criteria", per_criterion}});
    }
    return {{"command", "simulate"}, {"results", results}};
}

json cmd_boston_cv(const CliConfig& config)
{
    const Dataset data = load(config);
    const auto criteria = parse_criteria(config.criteria);
    Rng rng(config.seed);
    CvOptions options;
    options.splits = config.splits;
    options.scheme = config.scheme;
    options.workers = config.workers;
    const CvResult result = boston_cv(data, criteria, rng, options);

    auto cell_json = [](const DofCell& cell) {
        return json{{"nll", number_json(cell.nll)},
                    {"nll_se", number_json(cell.nll_se)},
                    {"mae", number_json(cell.mae)},
                    {"mae_se", number_json(cell.mae_se)}};
    };
    json grid_json = json::array();
    for (Dof nu : result.dof_grid)
        grid_json.push_back(dof_json(nu));
    json per_criterion = json::array();
    for (const auto& s : result.criteria)
    {
        json per_dof = json::array();
        for (const auto& cell : s.per_dof)
            per_dof.push_back(cell_json(cell));
        per_criterion.push_back({{"criterion", to_string(s.criterion)},
                                 {"per_dof", per_dof},
                                 {"selected", cell_json(s.selected)},
                                 {"dof_selected", s.dof_counts}});
    }
    return {{"command", "boston-cv"},
            {"dataset", dataset_json(config, data)},
            {"seed", config.seed},
            {"scheme", to_string(config.scheme)},
            {"splits", result.splits},
            {"train_size", result.train_size},
            {"test_size", result.test_size},
            {"dof_grid", grid_json},
            {"criteria", per_criterion}};
}

json run_command(const CliConfig& config)
{
    if (config.subcommand == "fit")
        return cmd_fit(config);
    if (config.subcommand == "select")
        return cmd_select(config);
    if (config.subcommand == "posterior")
        return cmd_posterior(config);
    if (config.subcommand == "simulate")
        return cmd_simulate(config);
    if (config.subcommand == "boston-cv")
        return cmd_boston_cv(config);
    throw InputError("unknown subcommand '" + config.subcommand + "'");
}

} // namespace mmlreg::cli
