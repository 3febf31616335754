#include "mmlreg/estimation.hpp"

#include "mmlreg/distributions.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mmlreg
{

void EMConfig::validate() const
{
    if (max_iter < 1)
        throw InputError("EM max_iter must be >= 1");
    if (!(rel_tol > 0.0))
        throw InputError("EM rel_tol must be positive");
}

WlsSolution wls_fit(const Eigen::MatrixXd& Xs, const Eigen::VectorXd& y, const Eigen::VectorXd& w)
{
    const Eigen::Index n = Xs.rows();
    const Eigen::Index p = Xs.cols();
    if (y.size() != n || w.size() != n)
        throw InputError("wls_fit: dimension mismatch");
    if ((w.array() <= 0.0).any())
        throw InputError("wls_fit: weights must be positive");

    const Eigen::ArrayXd sw = w.array().sqrt();
    Eigen::MatrixXd A(n, p + 1);
    A.col(0) = sw.matrix();
    A.rightCols(p) = sw.matrix().asDiagonal() * Xs;
    const Eigen::VectorXd b = (sw * y.array()).matrix();

    // Equilibrate columns so predictors on very different scales share one tolerance.
    Eigen::VectorXd scale = A.colwise().norm().transpose();
    for (Eigen::Index j = 0; j <= p; ++j)
    {
        if (!(scale(j) > 0.0))
            throw SingularDesignError("wls_fit: design column " + std::to_string(j) +
                                      " is identically zero");
        scale(j) = 1.0 / scale(j);
    }
    A = A * scale.asDiagonal();

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p + 1, p + 1);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram.selfadjointView<Eigen::Lower>());
    const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-13 ||
        pivots.minCoeff() < 1e-13 * pivots.maxCoeff())
        throw SingularDesignError("wls_fit: weighted design is rank deficient");

    const Eigen::VectorXd coef = scale.asDiagonal() * ldlt.solve(A.transpose() * b);
    WlsSolution out;
    out.beta0 = coef(0);
    out.beta = coef.tail(p);
    return out;
}

Eigen::VectorXd em_weights(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, double tau, Dof nu)
{
    if (y.size() != mu.size())
        throw InputError("em_weights: dimension mismatch");
    if (!(tau > 0.0))
        throw InputError("em_weights: tau must be positive");
    if (nu.is_gaussian())
        return Eigen::VectorXd::Ones(y.size());
    const double v = nu.value();
    const Eigen::ArrayXd d2 = (y - mu).array().square() / tau;
    return ((v + 1.0) / (v + d2)).matrix();
}

HyperK estimate_K(const Eigen::MatrixXd& Xs, const Eigen::VectorXd& beta_ml)
{
    if (Xs.cols() != beta_ml.size())
        throw InputError("estimate_K: beta length does not match design columns");
    if (beta_ml.size() == 0)
        return HyperK(0.0);
    return HyperK((Xs * beta_ml).squaredNorm());
}

double optimize_tau(double wss, std::size_t n, std::size_t p, double B)
{
    if (!(B >= 0.0))
        throw InputError("optimize_tau: B must be non-negative");
    return optimize_tau_log(wss, n, p, B == 0.0 ? -std::numeric_limits<double>::infinity()
                                                : std::log(B));
}

double optimize_tau_log(double wss, std::size_t n, std::size_t p, double log_b)
{
    if (!(wss > 0.0) || !std::isfinite(wss))
        throw PerfectFitError("optimize_tau: weighted residual sum of squares is " +
                              std::to_string(wss));
    if (n <= p + 1)
        throw InputError("optimize_tau: need n > p + 1");

    const double nn = static_cast<double>(n);
    const double pp = static_cast<double>(p);
    if (p == 0 || log_b == -std::numeric_limits<double>::infinity())
        return wss / (nn - 1.0);

    // Stationarity in t = log tau:
    //   -(p/2) sigmoid(log B - p t) + (n-1)/2 - (wss/2) exp(-t) = 0,
    // increasing in t, non-positive at wss/(n-1) and non-negative at wss/(n-p-1).
    auto slope = [&](double t) {
        const double z = log_b - pp * t;
        const double sig = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
        return -0.5 * pp * sig + 0.5 * (nn - 1.0) - 0.5 * wss * std::exp(-t);
    };

    const double t_lo = std::log(wss / (nn - 1.0));
    const double t_hi = std::log(wss / (nn - pp - 1.0));
    const double f_lo = slope(t_lo);
    const double f_hi = slope(t_hi);
    if (f_lo >= 0.0)
        return std::exp(t_lo);
    if (f_hi <= 0.0)
        return std::exp(t_hi);

    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t max_iter = 200;
    auto [l, r] = boost::math::tools::toms748_solve(slope, t_lo, t_hi, f_lo, f_hi, tol, max_iter);
    return std::exp(0.5 * (l + r));
}

StructureCodingScheme default_coding(const Dataset& data, const ModelStructure& structure)
{
    return StructureCodingScheme(structure.scheme(), std::max<std::size_t>(data.q(), 1));
}

namespace
{

void check_fit_preconditions(const Dataset& data, const ModelStructure& structure,
                             const EMConfig& config)
{
    config.validate();
    if (data.n() <= structure.size() + 2)
        throw InputError("fit needs n > p + 2 (n=" + std::to_string(data.n()) +
                         ", p=" + std::to_string(structure.size()) + ")");
}

// Steps that raise the objective by no more than rounding noise are still taken,
// so the iterate keeps approaching the fixed point.
bool accept_step(double obj, double next_obj)
{
    return next_obj <= obj + 1e-13 * std::abs(obj);
}

/// Residual scale below which the structure interpolates the data.
void check_not_perfect(const Eigen::VectorXd& y, double rss)
{
    const double tss = (y.array() - y.mean()).square().sum();
    if (!(rss > 1e-20 * tss) || tss == 0.0)
        throw PerfectFitError("structure fits the response exactly; tau estimate degenerates");
}

/// Sum over observations of the t log-kernel scaled by (nu+1)/2, or rss/(2 tau).
double data_term(const Eigen::VectorXd& r, double tau, Dof nu)
{
    if (nu.is_gaussian())
        return 0.5 * r.squaredNorm() / tau;
    const double v = nu.value();
    return 0.5 * (v + 1.0) * (r.array().square() / (v * tau)).log1p().sum();
}

struct Iterate
{
    WlsSolution coef;
    double tau = 0.0;
    Eigen::VectorXd residual;
};

Iterate ols_start(const Eigen::MatrixXd& Xs, const Eigen::VectorXd& y)
{
    Iterate it;
    it.coef = wls_fit(Xs, y, Eigen::VectorXd::Ones(y.size()));
    it.residual = y - TParams{it.coef.beta0, it.coef.beta, 1.0, Dof::gaussian()}.fitted(Xs);
    it.tau = it.residual.squaredNorm() / static_cast<double>(y.size());
    return it;
}

TParams to_params(const Iterate& it, Dof nu)
{
    return TParams{it.coef.beta0, it.coef.beta, it.tau, nu};
}

} // namespace

FitResult ml_fit(const Dataset& data, const ModelStructure& structure, Dof nu,
                 const EMConfig& config)
{
    check_fit_preconditions(data, structure, config);
    const Eigen::MatrixXd Xs = submatrix(data, structure);
    const Eigen::VectorXd& y = data.y();
    const double n = static_cast<double>(data.n());

    Iterate cur = ols_start(Xs, y);
    check_not_perfect(y, cur.residual.squaredNorm());

    FitResult out;
    auto nll = [&](const Iterate& it) { return neg_log_likelihood(y, y - it.residual, it.tau, nu); };
    double obj = nll(cur);
    out.trace.push_back(obj);

    if (nu.is_gaussian())
    {
        out.iterations = 1;
        out.converged = true;
    }
    else
    {
        for (int iter = 1; iter <= config.max_iter; ++iter)
        {
            const Eigen::VectorXd w = em_weights(y, y - cur.residual, cur.tau, nu);
            Iterate next;
            next.coef = wls_fit(Xs, y, w);
            next.residual = y - to_params(next, nu).fitted(Xs);
            const double wss = (w.array() * next.residual.array().square()).sum();
            check_not_perfect(y, next.residual.squaredNorm());
            next.tau = wss / n;
            const double next_obj = nll(next);
            out.trace.push_back(next_obj);
            out.iterations = iter;

            const double change = std::abs(obj - next_obj);
            if (accept_step(obj, next_obj))
            {
                cur = std::move(next);
                obj = next_obj;
            }
            if (change <= config.rel_tol * std::abs(obj))
            {
                out.converged = true;
                break;
            }
        }
    }

    out.params = to_params(cur, nu);
    out.K = estimate_K(Xs, cur.coef.beta);
    out.objective = obj;
    return out;
}

FitResult mml_fit_with_k(const Dataset& data, const ModelStructure& structure, Dof nu, HyperK K,
                         const EMConfig& config, const StructureCodingScheme& coding)
{
    check_fit_preconditions(data, structure, config);
    const Eigen::MatrixXd Xs = submatrix(data, structure);
    const Eigen::VectorXd& y = data.y();
    const std::size_t n = data.n();
    const std::size_t p = structure.size();
    const double log_b = log_coefficient_volume(p, K, nu);

    // Parameter-dependent part of the message length; differs from the total by a constant.
    auto message = [&](const Iterate& it) {
        const double pen = log_b == -std::numeric_limits<double>::infinity()
                               ? 0.0
                               : assertion_beta(p, K, it.tau, nu);
        return pen + 0.5 * (static_cast<double>(n) - 1.0) * std::log(it.tau) +
               data_term(it.residual, it.tau, nu);
    };

    Iterate cur = ols_start(Xs, y);
    check_not_perfect(y, cur.residual.squaredNorm());

    FitResult out;
    double obj = message(cur);
    out.trace.push_back(obj);

    const int max_iter = nu.is_gaussian() ? 1 : config.max_iter;
    for (int iter = 1; iter <= max_iter; ++iter)
    {
        const Eigen::VectorXd w = em_weights(y, y - cur.residual, cur.tau, nu);
        Iterate next;
        next.coef = wls_fit(Xs, y, w);
        next.residual = y - to_params(next, nu).fitted(Xs);
        check_not_perfect(y, next.residual.squaredNorm());
        const double wss = (w.array() * next.residual.array().square()).sum();
        next.tau = optimize_tau_log(wss, n, p, log_b);
        const double next_obj = message(next);
        out.trace.push_back(next_obj);
        out.iterations = iter;

        const double change = std::abs(obj - next_obj);
        if (accept_step(obj, next_obj) || nu.is_gaussian())
        {
            cur = std::move(next);
            obj = next_obj;
        }
        if (nu.is_gaussian() || change <= config.rel_tol * std::abs(obj))
        {
            out.converged = true;
            break;
        }
    }

    out.params = to_params(cur, nu);
    out.K = K;
    const CodelengthBreakdown breakdown = total_message_length(data, structure, out.params, K, coding);
    out.objective = breakdown.total();
    out.breakdown = breakdown;

    const double offset = out.objective - obj;
    for (double& v : out.trace)
        v += offset;
    return out;
}

FitResult mml_fit(const Dataset& data, const ModelStructure& structure, Dof nu,
                  const EMConfig& config, std::optional<StructureCodingScheme> coding)
{
    const FitResult ml = ml_fit(data, structure, nu, config);
    return mml_fit_with_k(data, structure, nu, ml.K, config,
                          coding.value_or(default_coding(data, structure)));
}

} // namespace mmlreg
