#include "mmlreg/codelength.hpp"

#include "mmlreg/detail/special.hpp"
#include "mmlreg/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace mmlreg
{

namespace
{

constexpr double kPi = std::numbers::pi;

/// (nu+1)/(nu+3) on the log scale; 0 in the Gaussian limit.
double log_fisher_ratio(Dof nu)
{
    if (nu.is_gaussian())
        return 0.0;
    return std::log((nu.value() + 1.0) / (nu.value() + 3.0));
}

/// 0.5 log(1 + exp(L)) without overflow.
double half_log1p_exp(double L)
{
    if (L == -std::numeric_limits<double>::infinity())
        return 0.0;
    if (L > 35.0)
        return 0.5 * (L + std::log1p(std::exp(-L)));
    return 0.5 * std::log1p(std::exp(L));
}

void check_params(const Dataset& data, const ModelStructure& structure, const TParams& params)
{
    if (static_cast<std::size_t>(params.beta.size()) != structure.size())
        throw InputError("total_message_length: structure has " +
                         std::to_string(structure.size()) + " predictors but beta has " +
                         std::to_string(params.beta.size()) + " entries");
    if (!(params.tau > 0.0))
        throw InputError("total_message_length: tau must be positive");
    if (structure.size() > data.q())
        throw InputError("total_message_length: structure larger than the dataset");
}

} // namespace

HyperK::HyperK(double k) : value{k}
{
    if (!(k >= 0.0) || !std::isfinite(k))
        throw InputError("hyperparameter K must be finite and non-negative");
}

StructureCodingScheme::StructureCodingScheme(SearchScheme scheme_, std::size_t q_)
    : scheme{scheme_}, q{q_}
{
    if (q_ < 1)
        throw InputError("structure coding needs at least one candidate predictor");
}

double kappa_pow(int k)
{
    if (k < 1)
        throw InputError("kappa_pow: k must be >= 1");
    const double kk = k;
    return std::exp(-kk * std::log(2.0) + std::log(kk) + (1.0 - kk) * std::log(kPi) +
                    2.0 * detail::kDigammaOne - kk);
}

double xtx_logdet(const Eigen::MatrixXd& Xs)
{
    if (Xs.cols() == 0)
        return 0.0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
    if (qr.rank() < Xs.cols())
        throw SingularDesignError("design matrix is rank deficient (rank " +
                                  std::to_string(qr.rank()) + " < " +
                                  std::to_string(Xs.cols()) + ")");
    return 2.0 * qr.matrixQR().diagonal().cwiseAbs().array().log().sum();
}

double fisher_logdet(std::size_t n, std::size_t p, double tau, Dof nu, double xtx_log_det)
{
    if (n < 1 || !(tau > 0.0))
        throw InputError("fisher_logdet: need n >= 1 and tau > 0");
    const double pp = static_cast<double>(p);
    double value = 2.0 * std::log(static_cast<double>(n)) + xtx_log_det - std::log(2.0) -
                   (pp + 3.0) * std::log(tau);
    if (!nu.is_gaussian())
    {
        const double v = nu.value();
        value += std::log(v) + (pp + 1.0) * std::log(v + 1.0) - (pp + 2.0) * std::log(v + 3.0);
    }
    return value;
}

double log_coefficient_volume(std::size_t p, HyperK K, Dof nu)
{
    if (p == 0 || K.value == 0.0)
        return -std::numeric_limits<double>::infinity();
    const double pp = static_cast<double>(p);
    return std::log(kappa_pow(static_cast<int>(p))) +
           pp * (std::log(kPi * K.value) + log_fisher_ratio(nu)) -
           2.0 * detail::log_gamma(0.5 * pp + 1.0);
}

double assertion_beta(std::size_t p, HyperK K, double tau, Dof nu)
{
    if (!(tau > 0.0))
        throw InputError("assertion_beta: tau must be positive");
    const double log_b = log_coefficient_volume(p, K, nu);
    return half_log1p_exp(log_b - static_cast<double>(p) * std::log(tau));
}

double assertion_scale(std::size_t n, double tau, Dof nu)
{
    if (n < 1 || !(tau > 0.0))
        throw InputError("assertion_scale: need n >= 1 and tau > 0");
    const double nn = static_cast<double>(n);
    double inner = 2.0 * std::log(nn) - std::log(2.0) - 3.0 * std::log(tau);
    if (!nu.is_gaussian())
    {
        const double v = nu.value();
        inner += std::log(v) + std::log(v + 1.0) - 2.0 * std::log(v + 3.0);
    }
    return std::log(tau) + 0.5 * inner + 0.5 * std::log(kappa_pow(2));
}

double detail_length(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, double tau, Dof nu,
                     std::size_t p)
{
    return neg_log_likelihood(y, mu, tau, nu) + 0.5 * (static_cast<double>(p) + 2.0);
}

double hyper_k_length(std::size_t n)
{
    if (n < 1)
        throw InputError("hyper_k_length: n must be >= 1");
    return 0.5 * std::log(static_cast<double>(n));
}

double structure_length(const StructureCodingScheme& coding, std::size_t p)
{
    if (p > coding.q)
        throw InputError("structure_length: p=" + std::to_string(p) + " exceeds q=" +
                         std::to_string(coding.q));
    const double q = static_cast<double>(coding.q);
    const double index = std::log(q + 1.0);
    if (coding.scheme == SearchScheme::Nested)
        return index;
    const double pp = static_cast<double>(p);
    const double log_choose = detail::log_gamma(q + 1.0) - detail::log_gamma(pp + 1.0) -
                              detail::log_gamma(q - pp + 1.0);
    return log_choose + index;
}

CodelengthBreakdown total_message_length(const Dataset& data, const ModelStructure& structure,
                                         const TParams& params, HyperK K,
                                         const StructureCodingScheme& coding)
{
    check_params(data, structure, params);
    const std::size_t p = structure.size();
    const Eigen::VectorXd mu = params.fitted(submatrix(data, structure));

    CodelengthBreakdown out;
    out.assertion_beta = assertion_beta(p, K, params.tau, params.nu);
    out.assertion_scale = assertion_scale(data.n(), params.tau, params.nu);
    out.detail = detail_length(data.y(), mu, params.tau, params.nu, p);
    out.hyper_k = hyper_k_length(data.n());
    out.structure = structure_length(coding, p);
    return out;
}

CodelengthBreakdown gaussian_message_length(const Dataset& data, const ModelStructure& structure,
                                            const TParams& params, HyperK K,
                                            const StructureCodingScheme& coding)
{
    if (!params.nu.is_gaussian())
        throw InputError("gaussian_message_length requires nu = inf");
    check_params(data, structure, params);

    const double n = static_cast<double>(data.n());
    const double p = static_cast<double>(structure.size());
    const double tau = params.tau;
    const Eigen::VectorXd mu = params.fitted(submatrix(data, structure));
    const double rss = (data.y() - mu).squaredNorm();

    double log_c = -std::numeric_limits<double>::infinity();
    if (structure.size() > 0 && K.value > 0.0)
        log_c = std::log(kappa_pow(static_cast<int>(structure.size()))) + p * std::log(kPi) -
                2.0 * detail::log_gamma(0.5 * p + 1.0) + p * std::log(K.value / tau);

    CodelengthBreakdown out;
    out.detail = 0.5 * n * std::log(2.0 * kPi * tau) + rss / (2.0 * tau) + 0.5 * p;
    out.assertion_scale =
        -0.5 * std::log(tau) + std::log(n) - 0.5 * std::log(4.0 * kPi) + detail::kDigammaOne;
    out.assertion_beta = half_log1p_exp(log_c);
    out.hyper_k = 0.5 * std::log(n);
    out.structure = structure_length(coding, structure.size());
    return out;
}

} // namespace mmlreg
