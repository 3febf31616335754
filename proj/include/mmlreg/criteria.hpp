#pragma once

/** @file
 * Baseline model selection criteria scored at maximum likelihood fits.
 * Values are in nits on the negative log-likelihood scale (no factor of 2).
 */

#include <cstddef>
#include <string>

namespace mmlreg
{

enum class Criterion
{
    MML,
    BIC,
    AICc,
    MDL,
};

std::string to_string(Criterion c);
Criterion parse_criterion(const std::string& name);

struct CriterionScore
{
    Criterion name = Criterion::MML;
    double value = 0.0;
    /// Free parameters; p + 2 for BIC and AICc.
    std::size_t k = 0;
};

/// nll + (k/2) log n
double bic(double nll, std::size_t k, std::size_t n);

/// nll + k + 2k(k+1)/(n-k-1); throws when n <= k + 1.
double aicc(double nll, std::size_t k, std::size_t n);

/**
 * Rissanen's MDL denoising criterion for Gaussian regression with the
 * structure-independent constant dropped:
 *
 *   (n-p-1)/2 log(tau/(n-p-1)) + (p+1)/2 log(R/(p+1))
 *     + 0.5 log((p+1)(n-p-1)) + (n/2) log(2 n pi e) - 3 log 2
 *
 * with tau = RSS/(n-p-1) and R = K/n. Undefined for p = 0; see mdl_null_model.
 */
double mdl_denoising(double tau_hat, double R_hat, std::size_t n, std::size_t p);

/// Null-model score used in place of mdl_denoising when p = 0: the same
/// expression with the log R term omitted.
double mdl_null_model(double tau_hat, std::size_t n);

} // namespace mmlreg
