#include "mmlreg/simulation.hpp"

#include "mmlreg/detail/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

namespace mmlreg
{

void SimConfig::validate() const
{
    if (n_train < 3 || n_test < 1)
        throw InputError("simulation: need n_train >= 3 and n_test >= 1");
    if (q < 1)
        throw InputError("simulation: need q >= 1");
    if (support_size > q)
        throw InputError("simulation: support size exceeds q");
    if (!std::isfinite(signal))
        throw InputError("simulation: signal must be finite");
    if (!(true_tau > 0.0) || !std::isfinite(true_tau))
        throw InputError("simulation: true tau must be positive and finite");
    if (replications < 1)
        throw InputError("simulation: need at least one replication");
    if (!(rho > -1.0 && rho < 1.0))
        throw InputError("simulation: rho must lie in (-1, 1)");
    if (n_lambda < 1)
        throw InputError("simulation: n_lambda must be >= 1");
}

std::size_t support_size_for(const std::string& sparsity)
{
    if (sparsity == "dense")
        return 15;
    if (sparsity == "balanced")
        return 8;
    if (sparsity == "sparse")
        return 3;
    throw InputError("unknown sparsity '" + sparsity + "' (expected dense|balanced|sparse)");
}

double signal_for(const std::string& strength)
{
    if (strength == "strong")
        return 2.0;
    if (strength == "moderate")
        return 1.0;
    if (strength == "weak")
        return 0.5;
    throw InputError("unknown signal strength '" + strength + "' (expected strong|moderate|weak)");
}

Eigen::MatrixXd generate_design(std::size_t n, std::size_t q, double rho, Rng& rng)
{
    if (!(rho > -1.0 && rho < 1.0))
        throw InputError("generate_design: rho must lie in (-1, 1)");
    std::normal_distribution<double> normal(0.0, 1.0);
    const double innovation = std::sqrt(1.0 - rho * rho);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(q));
    for (Eigen::Index i = 0; i < X.rows(); ++i)
    {
        double prev = 0.0;
        for (Eigen::Index j = 0; j < X.cols(); ++j)
        {
            const double z = normal(rng.engine());
            prev = j == 0 ? z : rho * prev + innovation * z;
            X(i, j) = prev;
        }
    }
    return X;
}

Eigen::VectorXd generate_response(const Eigen::MatrixXd& X, const std::vector<std::size_t>& support,
                                  double signal, double beta0, double tau, Dof nu, Rng& rng)
{
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(X.rows(), beta0);
    for (std::size_t j : support)
    {
        if (j >= static_cast<std::size_t>(X.cols()))
            throw InputError("generate_response: support index out of range");
        mu += signal * X.col(static_cast<Eigen::Index>(j));
    }
    return mu + sample_t(static_cast<std::size_t>(X.rows()), TSpec(0.0, tau, nu), rng);
}

double empirical_kl(const Eigen::VectorXd& y_test, const Eigen::VectorXd& mu_true,
                    const TSpec& true_noise, const Eigen::VectorXd& mu_fit, const TSpec& fit_noise)
{
    if (y_test.size() == 0 || y_test.size() != mu_true.size() || y_test.size() != mu_fit.size())
        throw InputError("empirical_kl: length mismatch");
    return (neg_log_likelihood(y_test, mu_fit, fit_noise.tau, fit_noise.nu) -
            neg_log_likelihood(y_test, mu_true, true_noise.tau, true_noise.nu)) /
           static_cast<double>(y_test.size());
}

double quadrature_kl(const Eigen::VectorXd& mu_true, const TSpec& true_noise,
                     const Eigen::VectorXd& mu_fit, const TSpec& fit_noise)
{
    if (mu_true.size() == 0 || mu_true.size() != mu_fit.size())
        throw InputError("quadrature_kl: length mismatch");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < mu_true.size(); ++i)
        sum += kl_divergence(TSpec(mu_true(i), true_noise.tau, true_noise.nu),
                             TSpec(mu_fit(i), fit_noise.tau, fit_noise.nu));
    return sum / static_cast<double>(mu_true.size());
}

Eigen::VectorXd predict_raw(const Dataset& train, const ModelStructure& structure,
                            const TParams& params, const Eigen::MatrixXd& X_raw)
{
    if (static_cast<std::size_t>(X_raw.cols()) != train.q())
        throw InputError("predict_raw: column count differs from the training data");
    if (static_cast<std::size_t>(params.beta.size()) != structure.size())
        throw InputError("predict_raw: coefficient count differs from the structure");
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(X_raw.rows(), params.beta0);
    const auto& gamma = structure.gamma();
    for (std::size_t k = 0; k < gamma.size(); ++k)
    {
        const auto j = static_cast<Eigen::Index>(gamma[k]);
        mu += params.beta(static_cast<Eigen::Index>(k)) *
              (X_raw.col(j).array() - train.column_means()(j)).matrix();
    }
    return mu;
}

namespace
{

double mean_of(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double>& v)
{
    if (v.size() < 2)
        return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

std::size_t dof_index(const std::vector<Dof>& grid, Dof nu)
{
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (grid[k] == nu)
            return k;
    return grid.size();
}

std::vector<std::string> predictor_names(std::size_t q)
{
    std::vector<std::string> names;
    names.reserve(q);
    for (std::size_t j = 0; j < q; ++j)
        names.push_back("x" + std::to_string(j + 1));
    return names;
}

struct Replication
{
    std::vector<Metrics> per_criterion;
    std::vector<std::size_t> chosen_dof;
    std::string error;
};

} // namespace

ExperimentResult run_experiment(const SimConfig& config, const std::vector<Criterion>& criteria,
                                unsigned workers)
{
    config.validate();
    if (criteria.empty())
        throw InputError("run_experiment: no criteria requested");

    ExperimentResult result;
    result.config = config;
    result.dof_grid = published_dof_grid().values;

    std::vector<std::size_t> support(config.support_size);
    std::iota(support.begin(), support.end(), std::size_t{0});
    const auto names = predictor_names(config.q);
    const Rng root(config.seed);

    std::vector<Replication> reps(config.replications);
    detail::parallel_for(reps.size(), workers, [&](std::size_t r) {
        Replication& rep = reps[r];
        try
        {
            Rng rng = root.substream(r);
            const Eigen::MatrixXd X_train = generate_design(config.n_train, config.q, config.rho, rng);
            Eigen::VectorXd y_train = generate_response(X_train, support, config.signal, 0.0,
                                                        config.true_tau, config.true_nu, rng);
            const Eigen::MatrixXd X_test = generate_design(config.n_test, config.q, config.rho, rng);
            Eigen::VectorXd mu_true = Eigen::VectorXd::Zero(X_test.rows());
            for (std::size_t j : support)
                mu_true += config.signal * X_test.col(static_cast<Eigen::Index>(j));
            const Eigen::VectorXd y_test =
                mu_true + sample_t(config.n_test, TSpec(0.0, config.true_tau, config.true_nu), rng);

            const Dataset train(std::move(y_train), X_train, names);
            const auto structures = lasso_path_structures(train, config.n_lambda);
            SelectOptions options;
            options.workers = 1;
            const auto reports =
                select_many(train, structures, result.dof_grid, criteria,
                            StructureCodingScheme(SearchScheme::Nested, config.q), options);

            const TSpec true_noise(0.0, config.true_tau, config.true_nu);
            for (const auto& report : reports)
            {
                const CandidateScore& best = report.best();
                const TParams& params = best.fit.params;
                const Eigen::VectorXd mu_fit = predict_raw(train, best.structure, params, X_test);
                const TSpec fit_noise(0.0, params.tau, params.nu);

                Metrics m;
                m.empirical_kl = config.kl_mode == KlMode::Empirical
                                     ? empirical_kl(y_test, mu_true, true_noise, mu_fit, fit_noise)
                                     : quadrature_kl(mu_true, true_noise, mu_fit, fit_noise);
                m.mae = (y_test - mu_fit).cwiseAbs().mean();
                std::size_t hits = 0;
                for (std::size_t j : best.structure.gamma())
                    if (j < config.support_size)
                        ++hits;
                m.false_positives = static_cast<double>(best.structure.size() - hits);
                m.false_negatives = static_cast<double>(config.support_size - hits);
                rep.per_criterion.push_back(m);
                rep.chosen_dof.push_back(dof_index(result.dof_grid, best.nu));
            }
        }
        catch (const NumericalError& e)
        {
            rep.error = e.what();
        }
    });

    for (std::size_t r = 0; r < reps.size(); ++r)
        if (!reps[r].error.empty())
        {
            ++result.failed_replications;
            result.warnings.push_back("replication " + std::to_string(r) + " failed: " + reps[r].error);
        }
    if (static_cast<double>(result.failed_replications) > 0.05 * static_cast<double>(reps.size()))
        throw NumericalError("run_experiment: " + std::to_string(result.failed_replications) + " of " +
                             std::to_string(reps.size()) + " replications failed (budget is 5%)");

    for (std::size_t c = 0; c < criteria.size(); ++c)
    {
        CriterionSummary summary;
        summary.criterion = criteria[c];
        summary.dof_counts.assign(result.dof_grid.size(), 0);
        std::vector<double> kl, mae, fp, fn;
        for (const auto& rep : reps)
        {
            if (!rep.error.empty())
                continue;
            const Metrics& m = rep.per_criterion[c];
            summary.per_replication.push_back(m);
            kl.push_back(m.empirical_kl);
            mae.push_back(m.mae);
            fp.push_back(m.false_positives);
            fn.push_back(m.false_negatives);
            if (rep.chosen_dof[c] < summary.dof_counts.size())
                ++summary.dof_counts[rep.chosen_dof[c]];
        }
        summary.mean = {mean_of(kl), mean_of(mae), mean_of(fp), mean_of(fn)};
        summary.std_error = {std_error_of(kl), std_error_of(mae), std_error_of(fp), std_error_of(fn)};
        result.criteria.push_back(std::move(summary));
    }
    return result;
}

namespace
{

struct SplitOutcome
{
    // [criterion][dof] test NLL per observation and MAE; NaN when no candidate was scored.
    std::vector<std::vector<std::pair<double, double>>> per_dof;
    std::vector<std::pair<double, double>> selected;
    std::vector<std::size_t> chosen_dof;
};

DofCell summarize(const std::vector<double>& nll, const std::vector<double>& mae)
{
    DofCell cell;
    if (nll.empty())
    {
        cell.nll = cell.mae = cell.nll_se = cell.mae_se = std::numeric_limits<double>::quiet_NaN();
        return cell;
    }
    cell.nll = mean_of(nll);
    cell.mae = mean_of(mae);
    cell.nll_se = std_error_of(nll);
    cell.mae_se = std_error_of(mae);
    return cell;
}

} // namespace

CvResult boston_cv(const Dataset& data, const std::vector<Criterion>& criteria, Rng& rng,
                   const CvOptions& options)
{
    if (criteria.empty())
        throw InputError("boston_cv: no criteria requested");
    if (options.splits < 1)
        throw InputError("boston_cv: need at least one split");
    if (data.n() < 6)
        throw InputError("boston_cv: need at least 6 observations");

    CvResult result;
    result.splits = options.splits;
    result.train_size = data.n() / 2;
    result.test_size = data.n() - result.train_size;
    result.dof_grid = published_dof_grid().values;

    const Eigen::MatrixXd X_raw = data.raw_X();
    const auto structures = enumerate_structures(data.q(), options.scheme);
    const StructureCodingScheme coding(options.scheme, data.q());
    SelectOptions select_options;
    select_options.workers = options.workers;

    std::vector<SplitOutcome> outcomes(options.splits);
    for (std::size_t s = 0; s < options.splits; ++s)
    {
        Rng split_rng = rng.substream(s);
        std::vector<std::size_t> perm(data.n());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), split_rng.engine());
        std::vector<std::size_t> train_rows(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(result.train_size));
        std::vector<std::size_t> test_rows(perm.begin() + static_cast<std::ptrdiff_t>(result.train_size), perm.end());
        std::sort(train_rows.begin(), train_rows.end());
        std::sort(test_rows.begin(), test_rows.end());

        const Dataset train = data.subset_rows(train_rows);
        Eigen::MatrixXd X_test(static_cast<Eigen::Index>(test_rows.size()), X_raw.cols());
        Eigen::VectorXd y_test(static_cast<Eigen::Index>(test_rows.size()));
        for (std::size_t i = 0; i < test_rows.size(); ++i)
        {
            X_test.row(static_cast<Eigen::Index>(i)) = X_raw.row(static_cast<Eigen::Index>(test_rows[i]));
            y_test(static_cast<Eigen::Index>(i)) = data.y()(static_cast<Eigen::Index>(test_rows[i]));
        }
        const double n_test = static_cast<double>(test_rows.size());

        auto evaluate = [&](const CandidateScore& cand) {
            const Eigen::VectorXd mu = predict_raw(train, cand.structure, cand.fit.params, X_test);
            const double nll =
                neg_log_likelihood(y_test, mu, cand.fit.params.tau, cand.fit.params.nu) / n_test;
            const double mae = (y_test - mu).cwiseAbs().mean();
            return std::make_pair(nll, mae);
        };

        const auto reports = select_many(train, structures, result.dof_grid, criteria, coding, select_options);
        SplitOutcome& out = outcomes[s];
        for (const auto& report : reports)
        {
            std::vector<std::pair<double, double>> cells;
            for (const Dof& nu : result.dof_grid)
            {
                const CandidateScore* cand = best_at_dof(report, nu);
                cells.push_back(cand ? evaluate(*cand)
                                     : std::make_pair(std::numeric_limits<double>::quiet_NaN(),
                                                      std::numeric_limits<double>::quiet_NaN()));
            }
            out.per_dof.push_back(std::move(cells));
            out.selected.push_back(evaluate(report.best()));
            out.chosen_dof.push_back(dof_index(result.dof_grid, report.best().nu));
        }
    }

    for (std::size_t c = 0; c < criteria.size(); ++c)
    {
        CvSummary summary;
        summary.criterion = criteria[c];
        summary.dof_counts.assign(result.dof_grid.size(), 0);
        for (std::size_t k = 0; k < result.dof_grid.size(); ++k)
        {
            std::vector<double> nll, mae;
            for (const auto& out : outcomes)
                if (!std::isnan(out.per_dof[c][k].first))
                {
                    nll.push_back(out.per_dof[c][k].first);
                    mae.push_back(out.per_dof[c][k].second);
                }
            summary.per_dof.push_back(summarize(nll, mae));
        }
        std::vector<double> nll, mae;
        for (const auto& out : outcomes)
        {
            nll.push_back(out.selected[c].first);
            mae.push_back(out.selected[c].second);
            if (out.chosen_dof[c] < summary.dof_counts.size())
                ++summary.dof_counts[out.chosen_dof[c]];
        }
        summary.selected = summarize(nll, mae);
        result.criteria.push_back(std::move(summary));
    }
    return result;
}

} // namespace mmlreg
