#include "mmlreg/criteria.hpp"

#include "mmlreg/core.hpp"

#include <cmath>
#include <numbers>

namespace mmlreg
{

std::string to_string(Criterion c)
{
    switch (c)
    {
    case Criterion::MML: return "mml";
    case Criterion::BIC: return "bic";
    case Criterion::AICc: return "aicc";
    case Criterion::MDL: return "mdl";
    }
    return "unknown";
}

Criterion parse_criterion(const std::string& name)
{
    if (name == "mml")
        return Criterion::MML;
    if (name == "bic")
        return Criterion::BIC;
    if (name == "aicc")
        return Criterion::AICc;
    if (name == "mdl")
        return Criterion::MDL;
    throw InputError("unknown criterion '" + name + "' (expected mml|bic|aicc|mdl)");
}

double bic(double nll, std::size_t k, std::size_t n)
{
    if (n < 1)
        throw InputError("bic: n must be >= 1");
    return nll + 0.5 * static_cast<double>(k) * std::log(static_cast<double>(n));
}

double aicc(double nll, std::size_t k, std::size_t n)
{
    if (n <= k + 1)
        throw InputError("aicc: undefined for n <= k + 1 (n=" + std::to_string(n) +
                         ", k=" + std::to_string(k) + ")");
    const double kk = static_cast<double>(k);
    return nll + kk + 2.0 * kk * (kk + 1.0) / (static_cast<double>(n) - kk - 1.0);
}

namespace
{

double mdl_common(double tau_hat, std::size_t n, std::size_t p)
{
    const double nn = static_cast<double>(n);
    const double dof = nn - static_cast<double>(p) - 1.0;
    return 0.5 * dof * std::log(tau_hat / dof) +
           0.5 * std::log((static_cast<double>(p) + 1.0) * dof) +
           0.5 * nn * std::log(2.0 * nn * std::numbers::pi * std::numbers::e) - 3.0 * std::log(2.0);
}

} // namespace

double mdl_denoising(double tau_hat, double R_hat, std::size_t n, std::size_t p)
{
    if (p == 0)
        throw InputError("mdl_denoising: undefined for the null model");
    if (n <= p + 1)
        throw InputError("mdl_denoising: need n > p + 1");
    if (!(tau_hat > 0.0) || !(R_hat > 0.0))
        throw InputError("mdl_denoising: tau and R must be positive");
    const double pp = static_cast<double>(p);
    return mdl_common(tau_hat, n, p) + 0.5 * (pp + 1.0) * std::log(R_hat / (pp + 1.0));
}

double mdl_null_model(double tau_hat, std::size_t n)
{
    if (n <= 1 || !(tau_hat > 0.0))
        throw InputError("mdl_null_model: need n > 1 and tau > 0");
    return mdl_common(tau_hat, n, 0);
}

} // namespace mmlreg
