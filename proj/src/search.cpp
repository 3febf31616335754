#include "mmlreg/search.hpp"

#include "mmlreg/detail/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mmlreg
{

std::vector<ModelStructure> enumerate_structures(std::size_t q, SearchScheme scheme)
{
    std::vector<ModelStructure> out;
    if (scheme == SearchScheme::Nested)
    {
        out.reserve(q + 1);
        for (std::size_t p = 0; p <= q; ++p)
            out.push_back(ModelStructure::nested(p));
        return out;
    }
    if (q > kMaxAllSubsetsQ)
        throw InputError("all-subsets enumeration supports q <= " +
                         std::to_string(kMaxAllSubsetsQ) + ", got q=" + std::to_string(q));
    const std::size_t count = std::size_t{1} << q;
    out.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask)
    {
        std::vector<std::size_t> gamma;
        for (std::size_t j = 0; j < q; ++j)
            if (mask >> j & 1U)
                gamma.push_back(j);
        out.push_back(ModelStructure::subset(std::move(gamma)));
    }
    return out;
}

std::vector<ModelStructure> lasso_path_structures(const Dataset& data, int n_lambda)
{
    if (data.q() < 1)
        throw InputError("lasso_path_structures: need at least one predictor");
    if (n_lambda < 1)
        throw InputError("lasso_path_structures: n_lambda must be >= 1");

    const auto n = static_cast<double>(data.n());
    const Eigen::Index q = static_cast<Eigen::Index>(data.q());

    // Unit-variance columns for the path only; constant columns never enter.
    Eigen::MatrixXd Z = data.X();
    std::vector<bool> active(static_cast<std::size_t>(q), true);
    for (Eigen::Index j = 0; j < q; ++j)
    {
        const double sd = std::sqrt(Z.col(j).squaredNorm() / n);
        if (sd > 0.0)
            Z.col(j) /= sd;
        else
            active[static_cast<std::size_t>(j)] = false;
    }
    const Eigen::VectorXd yc = data.y().array() - data.y().mean();

    const Eigen::VectorXd corr = Z.transpose() * yc / n;
    double lambda_max = 0.0;
    for (Eigen::Index j = 0; j < q; ++j)
        if (active[static_cast<std::size_t>(j)])
            lambda_max = std::max(lambda_max, std::abs(corr(j)));

    std::vector<ModelStructure> out{ModelStructure::subset({})};
    if (lambda_max == 0.0)
        return out;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd r = yc;
    const double tol = 1e-10 * std::sqrt(yc.squaredNorm() / n);
    for (int k = 0; k < n_lambda; ++k)
    {
        const double frac = n_lambda == 1 ? 0.0 : static_cast<double>(k) / (n_lambda - 1);
        const double lambda = lambda_max * std::pow(1e-3, frac);

        for (int sweep = 0; sweep < 100000; ++sweep)
        {
            double max_delta = 0.0;
            for (Eigen::Index j = 0; j < q; ++j)
            {
                if (!active[static_cast<std::size_t>(j)])
                    continue;
                const double rho = Z.col(j).dot(r) / n + beta(j);
                const double updated =
                    std::copysign(std::max(std::abs(rho) - lambda, 0.0), rho);
                const double delta = updated - beta(j);
                if (delta != 0.0)
                {
                    r -= delta * Z.col(j);
                    beta(j) = updated;
                    max_delta = std::max(max_delta, std::abs(delta));
                }
            }
            if (max_delta <= tol)
                break;
        }

        std::vector<std::size_t> support;
        for (Eigen::Index j = 0; j < q; ++j)
            if (beta(j) != 0.0)
                support.push_back(static_cast<std::size_t>(j));
        ModelStructure s = ModelStructure::subset(std::move(support));
        if (std::find(out.begin(), out.end(), s) == out.end())
            out.push_back(std::move(s));
    }
    return out;
}

std::vector<double> model_posteriors(const std::vector<double>& codelengths)
{
    if (codelengths.empty())
        throw InputError("model_posteriors: no codelengths");
    double lo = std::numeric_limits<double>::infinity();
    for (double c : codelengths)
    {
        if (std::isnan(c) || c == -std::numeric_limits<double>::infinity())
            throw InputError("model_posteriors: codelengths must be finite");
        lo = std::min(lo, c);
    }
    if (!std::isfinite(lo))
        throw InputError("model_posteriors: every codelength is infinite");

    std::vector<double> out(codelengths.size());
    double total = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        out[i] = std::exp(-(codelengths[i] - lo));
        total += out[i];
    }
    for (double& v : out)
        v /= total;
    return out;
}

std::vector<double> marginal_inclusion(const std::vector<double>& posteriors,
                                       const std::vector<ModelStructure>& structures, std::size_t q)
{
    if (posteriors.size() != structures.size())
        throw InputError("marginal_inclusion: posteriors and structures are misaligned");
    std::vector<double> out(q, 0.0);
    for (std::size_t i = 0; i < structures.size(); ++i)
        for (std::size_t j : structures[i].gamma())
        {
            if (j >= q)
                throw InputError("marginal_inclusion: predictor index out of range");
            out[j] += posteriors[i];
        }
    for (double& v : out)
        v = std::clamp(v, 0.0, 1.0);
    return out;
}

namespace
{

struct CellFits
{
    std::optional<FitResult> ml;
    std::optional<FitResult> mml;
    std::string error;
};

std::optional<double> score_ml(Criterion criterion, const FitResult& ml, std::size_t p,
                               std::size_t n)
{
    const std::size_t k = p + 2;
    switch (criterion)
    {
    case Criterion::BIC: return bic(ml.objective, k, n);
    case Criterion::AICc:
        if (n <= k + 1)
            return std::nullopt;
        return aicc(ml.objective, k, n);
    case Criterion::MDL: {
        const double dof = static_cast<double>(n) - static_cast<double>(p) - 1.0;
        const double tau_hat = ml.params.tau * static_cast<double>(n) / dof;
        if (p == 0)
            return mdl_null_model(tau_hat, n);
        if (!(ml.K.value > 0.0))
            return std::nullopt;
        return mdl_denoising(tau_hat, ml.K.value / static_cast<double>(n), n, p);
    }
    case Criterion::MML: break;
    }
    return std::nullopt;
}

bool ranks_before(const CandidateScore& a, const CandidateScore& b)
{
    if (a.score != b.score)
        return a.score < b.score;
    if (a.structure.size() != b.structure.size())
        return a.structure.size() < b.structure.size();
    if (a.structure.gamma() != b.structure.gamma())
        return lexicographic_less(a.structure, b.structure);
    return a.order < b.order;
}

} // namespace

std::vector<SelectionReport> select_many(const Dataset& data,
                                         const std::vector<ModelStructure>& structures,
                                         const std::vector<Dof>& dof_grid,
                                         const std::vector<Criterion>& criteria,
                                         const StructureCodingScheme& coding,
                                         const SelectOptions& options)
{
    if (structures.empty())
        throw InputError("select: no candidate structures");
    if (criteria.empty())
        throw InputError("select: no criteria requested");
    options.em.validate();

    const bool need_mml = std::find(criteria.begin(), criteria.end(), Criterion::MML) != criteria.end();
    const bool need_mdl = std::find(criteria.begin(), criteria.end(), Criterion::MDL) != criteria.end();
    const bool need_grid = std::any_of(criteria.begin(), criteria.end(),
                                       [](Criterion c) { return c != Criterion::MDL; });

    // MDL is a Gaussian criterion; it gets its own column when the grid has no Gaussian member.
    std::vector<Dof> grid = need_grid ? dof_grid : std::vector<Dof>{};
    auto gaussian_it = std::find_if(grid.begin(), grid.end(), [](Dof d) { return d.is_gaussian(); });
    if (need_mdl && gaussian_it == grid.end())
        grid.push_back(Dof::gaussian());
    if (grid.empty())
        throw InputError("select: empty degrees-of-freedom grid");
    const std::size_t gaussian_col = static_cast<std::size_t>(
        std::find_if(grid.begin(), grid.end(), [](Dof d) { return d.is_gaussian(); }) - grid.begin());
    const std::size_t user_cols = need_grid ? dof_grid.size() : 0;

    const std::size_t n_cols = grid.size();
    std::vector<CellFits> cells(structures.size() * n_cols);
    detail::parallel_for(cells.size(), options.workers, [&](std::size_t idx) {
        const auto& s = structures[idx / n_cols];
        const std::size_t col = idx % n_cols;
        const Dof nu = grid[col];
        CellFits& cell = cells[idx];
        const bool grid_member = col < user_cols;
        try
        {
            cell.ml = ml_fit(data, s, nu, options.em);
            cell.ml->trace.clear();
            if (need_mml && grid_member)
            {
                cell.mml = mml_fit_with_k(data, s, nu, cell.ml->K, options.em, coding);
                cell.mml->trace.clear();
            }
        }
        catch (const NumericalError& e)
        {
            cell.error = e.what();
        }
        catch (const InputError& e)
        {
            cell.error = e.what();
        }
    });

    std::vector<SelectionReport> reports;
    for (Criterion criterion : criteria)
    {
        SelectionReport report;
        report.criterion = criterion;
        report.structures = structures;
        report.structure_scores.assign(structures.size(), std::numeric_limits<double>::infinity());

        for (std::size_t si = 0; si < structures.size(); ++si)
        {
            for (std::size_t col = 0; col < n_cols; ++col)
            {
                const bool in_scope = criterion == Criterion::MDL ? col == gaussian_col : col < user_cols;
                if (!in_scope)
                    continue;
                const std::size_t idx = si * n_cols + col;
                const CellFits& cell = cells[idx];
                const std::size_t p = structures[si].size();

                CandidateScore cand;
                cand.structure = structures[si];
                cand.nu = grid[col];
                cand.criterion = criterion;
                cand.order = idx;
                std::optional<double> score;
                if (criterion == Criterion::MML && cell.mml)
                {
                    cand.fit = *cell.mml;
                    cand.breakdown = cell.mml->breakdown;
                    score = cell.mml->objective;
                }
                else if (criterion != Criterion::MML && cell.ml)
                {
                    cand.fit = *cell.ml;
                    score = score_ml(criterion, *cell.ml, p, data.n());
                }
                if (!score || !std::isfinite(*score))
                {
                    ++report.failures;
                    if (report.warnings.size() < 20)
                        report.warnings.push_back(
                            "structure #" + std::to_string(si) + " at nu=" + to_string(grid[col]) +
                            " excluded: " + (cell.error.empty() ? "criterion undefined" : cell.error));
                    continue;
                }
                cand.score = *score;
                report.structure_scores[si] = std::min(report.structure_scores[si], cand.score);
                report.ranked.push_back(std::move(cand));
            }
        }
        if (report.ranked.empty())
            throw NumericalError("select: every candidate fit failed for criterion " +
                                 to_string(criterion));

        std::stable_sort(report.ranked.begin(), report.ranked.end(), ranks_before);
        report.posteriors = model_posteriors(report.structure_scores);
        report.marginal_inclusion = marginal_inclusion(report.posteriors, structures, data.q());
        reports.push_back(std::move(report));
    }
    return reports;
}

SelectionReport select(const Dataset& data, const std::vector<ModelStructure>& structures,
                       const std::vector<Dof>& dof_grid, Criterion criterion,
                       const StructureCodingScheme& coding, const SelectOptions& options)
{
    return std::move(select_many(data, structures, dof_grid, {criterion}, coding, options).front());
}

const CandidateScore* best_at_dof(const SelectionReport& report, Dof nu)
{
    for (const auto& cand : report.ranked)
        if (cand.nu == nu)
            return &cand;
    return nullptr;
}

} // namespace mmlreg
