// mmlreg: Student-t regression model selection by minimum message length.

#include "mmlreg/cli/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace
{

using mmlreg::cli::CliConfig;
using nlohmann::json;

int report_error(const std::string& kind, const std::string& message, int code)
{
    std::cerr << json{{"error", {{"type", kind}, {"message", message}, {"exit_code", code}}}}.dump()
              << "\n";
    return code;
}

void add_common(CLI::App* sub, CliConfig& cfg, std::string& scheme)
{
    sub->add_option("--seed", cfg.seed, "Master RNG seed");
    sub->add_option("--out", cfg.out, "Write the full JSON report here");
    sub->add_option("--workers", cfg.workers, "Worker threads (0 = all hardware threads)");
    sub->add_option("--scheme", scheme, "Structure search scheme: nested|subsets")->capture_default_str();
}

void add_data(CLI::App* sub, CliConfig& cfg)
{
    sub->add_option("--data", cfg.data, "CSV file with a header row")->required();
    sub->add_option("--target", cfg.target, "Response column")->capture_default_str();
}

void add_grid(CLI::App* sub, CliConfig& cfg)
{
    sub->add_option("--dof-grid", cfg.dof_grid, "Size of the JS-equidistant dof grid")->capture_default_str();
    sub->add_option("--dof-values", cfg.dof_values, "Explicit dof list, e.g. 1,1.9,5,inf");
}

} // namespace

int main(int argc, char** argv)
{
    CliConfig cfg;
    std::string scheme = "subsets";
    std::string criterion = "mml";
    bool print_json = false;
    std::string render_in;

    CLI::App app{"Student-t linear regression model selection by minimum message length"};
    app.require_subcommand(1);
    app.add_flag("--json", print_json, "Print the JSON report instead of the table");

    auto* fit = app.add_subcommand("fit", "Fit one structure");
    add_data(fit, cfg);
    add_common(fit, cfg, scheme);
    fit->add_option("--columns", cfg.columns, "Comma-separated predictors, 'all' or 'none'")->capture_default_str();
    fit->add_option("--nu", cfg.nu, "Degrees of freedom (number or inf)")->capture_default_str();
    fit->add_option("--method", cfg.method, "mml|ml")->capture_default_str();

    auto* sel = app.add_subcommand("select", "Rank structures x dof under one criterion");
    add_data(sel, cfg);
    add_common(sel, cfg, scheme);
    add_grid(sel, cfg);
    sel->add_option("--criterion", criterion, "mml|bic|aicc|mdl")->capture_default_str();
    sel->add_option("--top", cfg.top, "Rows shown in the table")->capture_default_str();

    auto* post = app.add_subcommand("posterior", "Model posteriors and marginal inclusion probabilities");
    add_data(post, cfg);
    add_common(post, cfg, scheme);
    add_grid(post, cfg);

    auto* sim = app.add_subcommand("simulate", "Synthetic criterion comparison");
    add_common(sim, cfg, scheme);
    sim->add_option("--true-nu", cfg.true_nu, "1|5|inf")->capture_default_str();
    sim->add_option("--sparsity", cfg.sparsity, "dense|balanced|sparse")->capture_default_str();
    sim->add_option("--signal", cfg.signal, "strong|moderate|weak")->capture_default_str();
    sim->add_flag("--all", cfg.all_configs, "Run all 27 configurations");
    sim->add_option("--replications", cfg.replications, "Replications per configuration (default 100)");
    sim->add_option("--n-test", cfg.n_test, "Test sample size")->capture_default_str();
    sim->add_option("--criteria", cfg.criteria, "Comma-separated criteria")->delimiter(',')->capture_default_str();
    sim->add_option("--kl-mode", cfg.kl_mode, "empirical|quadrature")->capture_default_str();

    auto* cv = app.add_subcommand("boston-cv", "Random half-split cross-validation");
    add_data(cv, cfg);
    add_common(cv, cfg, scheme);
    cv->add_option("--splits", cfg.splits, "Number of random splits")->capture_default_str();
    cv->add_option("--criteria", cfg.criteria, "Comma-separated criteria")->delimiter(',')->capture_default_str();

    auto* ren = app.add_subcommand("render", "Re-render a saved JSON report as a table");
    ren->add_option("--in", render_in, "Report written by --out")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        return report_error("usage", e.what(), 2);
    }

    try
    {
        json report;
        if (ren->parsed())
        {
            std::ifstream in(render_in);
            if (!in)
                throw mmlreg::InputError("cannot open " + render_in);
            report = json::parse(in);
        }
        else
        {
            cfg.subcommand = app.get_subcommands().front()->get_name();
            cfg.scheme = mmlreg::parse_scheme(scheme);
            cfg.criterion = mmlreg::parse_criterion(criterion);
            report = mmlreg::cli::run_command(cfg);
            if (cfg.out)
            {
                std::ofstream out(*cfg.out);
                if (!out)
                    throw mmlreg::InputError("cannot write " + cfg.out->string());
                out << report.dump(2) << "\n";
            }
        }
        if (print_json)
            std::cout << report.dump(2) << "\n";
        else
            std::cout << mmlreg::cli::render(report);
        return 0;
    }
    catch (const mmlreg::InputError& e)
    {
        return report_error("input", e.what(), 2);
    }
    catch (const json::exception& e)
    {
        return report_error("input", e.what(), 2);
    }
    catch (const mmlreg::NumericalError& e)
    {
        return report_error("numerical", e.what(), 3);
    }
    catch (const std::exception& e)
    {
        return report_error("numerical", e.what(), 3);
    }
}
