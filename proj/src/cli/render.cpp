#include "mmlreg/cli/commands.hpp"

#include <cstdio>
#include <iomanip>
#include <sstream>

namespace mmlreg::cli
{

using nlohmann::json;

std::string format_number(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", value);
    return buf;
}

namespace
{

std::string num(const json& v)
{
    if (v.is_null())
        return "-";
    return format_number(v.get<double>());
}

std::string dof_text(const json& v)
{
    if (v.is_string())
        return v.get<std::string>();
    std::ostringstream os;
    os << std::setprecision(6) << v.get<double>();
    return os.str();
}

std::string join(const json& names)
{
    if (names.empty())
        return "(intercept only)";
    std::string out;
    for (const auto& name : names)
    {
        if (!out.empty())
            out += ' ';
        out += name.get<std::string>();
    }
    return out;
}

std::string pad(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string render_fit(const json& r)
{
    std::ostringstream os;
    os << r["method"].get<std::string>() << " fit of " << r["dataset"]["target"].get<std::string>()
       << " on " << join(r["predictors"]) << "\n";
    const auto& params = r["params"];
    os << "  nu          " << dof_text(params["nu"]) << "\n";
    os << "  intercept   " << num(params["beta0"]) << "\n";
    for (std::size_t k = 0; k < params["beta"].size(); ++k)
        os << "  " << pad_right(r["predictors"][k].get<std::string>(), 12) << num(params["beta"][k]) << "\n";
    os << "  tau         " << num(params["tau"]) << "\n";
    os << "  K           " << num(r["K"]) << "\n";
    os << "  objective   " << num(r["objective"]) << "\n";
    os << "  iterations  " << r["iterations"].get<int>()
       << (r["converged"].get<bool>() ? " (converged)" : " (not converged)") << "\n";
    if (r.contains("breakdown"))
    {
        const auto& b = r["breakdown"];
        os << "message length (nits)\n";
        for (const char* key : {"assertion_beta", "assertion_scale", "detail", "hyper_k", "structure", "total"})
            os << "  " << pad_right(key, 16) << num(b[key]) << "\n";
    }
    return os.str();
}

std::string render_select(const json& r)
{
    std::ostringstream os;
    os << "criterion " << r["criterion"].get<std::string>() << ", scheme " << r["scheme"].get<std::string>()
       << ", " << r["candidates"].get<std::size_t>() << " candidates";
    if (r["failures"].get<std::size_t>() > 0)
        os << ", " << r["failures"].get<std::size_t>() << " excluded";
    os << "\n";
    os << pad("rank", 5) << pad("nu", 8) << pad("p", 4) << pad("score", 12) << "  predictors\n";
    const std::size_t top = r["top"].get<std::size_t>();
    const auto& ranked = r["ranked"];
    for (std::size_t i = 0; i < ranked.size() && i < top; ++i)
    {
        const auto& c = ranked[i];
        os << pad(std::to_string(c["rank"].get<std::size_t>()), 5) << pad(dof_text(c["nu"]), 8)
           << pad(std::to_string(c["p"].get<std::size_t>()), 4) << pad(num(c["score"]), 12) << "  "
           << join(c["predictors"]) << "\n";
    }
    return os.str();
}

std::string render_posterior(const json& r)
{
    std::ostringstream os;
    os << "marginal inclusion probabilities (best message length " << num(r["best_codelength"])
       << " nits)\n";
    for (const auto& m : r["marginal_inclusion"])
        os << "  " << pad_right(m["predictor"].get<std::string>(), 12) << num(m["probability"]) << "\n";
    os << "most probable structures\n";
    const auto& models = r["models"];
    for (std::size_t i = 0; i < models.size() && i < 10; ++i)
        os << "  " << num(models[i]["posterior"]) << "  " << join(models[i]["predictors"]) << "\n";
    return os.str();
}

std::string render_simulate(const json& r)
{
    std::ostringstream os;
    os << pad_right("d.f.", 6) << pad_right("sparsity", 10) << pad_right("signal", 10) << pad_right("crit", 6)
       << pad("KL", 9) << pad("(se)", 9) << pad("MAE", 9) << pad("(se)", 9) << pad("FP", 9) << pad("FN", 9)
       << "\n";
    for (const auto& cell : r["results"])
    {
        const auto& cfg = cell["config"];
        for (const auto& c : cell["criteria"])
        {
            os << pad_right("t(" + dof_text(cfg["true_nu"]) + ")", 6)
               << pad_right(cfg["sparsity"].get<std::string>(), 10)
               << pad_right(cfg["signal"].get<std::string>(), 10)
               << pad_right(c["criterion"].get<std::string>(), 6) << pad(num(c["mean"]["empirical_kl"]), 9)
               << pad(num(c["std_error"]["empirical_kl"]), 9) << pad(num(c["mean"]["mae"]), 9)
               << pad(num(c["std_error"]["mae"]), 9) << pad(num(c["mean"]["false_positives"]), 9)
               << pad(num(c["mean"]["false_negatives"]), 9) << "\n";
        }
        if (cell["failed_replications"].get<std::size_t>() > 0)
            os << "  (" << cell["failed_replications"].get<std::size_t>() << " failed replications)\n";
    }
    return os.str();
}

std::string render_boston_cv(const json& r)
{
    std::ostringstream os;
    os << r["splits"].get<std::size_t>() << " splits, " << r["train_size"].get<std::size_t>() << " train / "
       << r["test_size"].get<std::size_t>() << " test\n";
    os << pad_right("", 12);
    for (const auto& nu : r["dof_grid"])
        os << pad("t(" + dof_text(nu) + ")", 10);
    os << pad("selected", 10) << "\n";
    for (const auto& c : r["criteria"])
    {
        const std::string name = c["criterion"].get<std::string>();
        os << pad_right(name + " NLL", 12);
        for (const auto& cell : c["per_dof"])
            os << pad(num(cell["nll"]), 10);
        os << pad(num(c["selected"]["nll"]), 10) << "\n";
        os << pad_right(name + " MAE", 12);
        for (const auto& cell : c["per_dof"])
            os << pad(num(cell["mae"]), 10);
        os << pad(num(c["selected"]["mae"]), 10) << "\n";
        os << pad_right(name + " chosen", 12);
        for (const auto& count : c["dof_selected"])
            os << pad(std::to_string(count.get<std::size_t>()), 10);
        os << "\n";
    }
    return os.str();
}

} // namespace

std::string render(const json& report)
{
    if (!report.contains("command"))
        throw InputError("render: report has no \"command\" field");
    const std::string command = report["command"].get<std::string>();
    try
    {
        if (command == "fit")
            return render_fit(report);
        if (command == "select")
            return render_select(report);
        if (command == "posterior")
            return render_posterior(report);
        if (command == "simulate")
            return render_simulate(report);
        if (command == "boston-cv")
            return render_boston_cv(report);
    }
    catch (const json::exception& e)
    {
        throw InputError("render: malformed " + command + " report: " + e.what());
    }
    throw InputError("render: unknown command '" + command + "'");
}

} // namespace mmlreg::cli
