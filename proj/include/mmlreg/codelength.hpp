#pragma once

/** @file
 * Message-length formulas for Student-t linear regression.
 *
 * The total codelength of a fitted structure is
 *
 *     I(beta | K) + I(beta0, tau) + I(y | theta) + I(K) + I(gamma)
 *
 * where the first term uses the small-sample form 0.5 log(1 + B / tau^p) so the
 * coding probability of the coefficients never exceeds one, and |X'X| from the
 * hyper-ellipsoid prior cancels against the Fisher information. All lengths
 * are in nits.
 */

#include "mmlreg/core.hpp"

#include <Eigen/Dense>

namespace mmlreg
{

/// Radius of the coefficient bounding region {beta : beta' X'X beta <= K}.
struct HyperK
{
    double value = 0.0;

    HyperK() = default;
    explicit HyperK(double k);
};

/// How the structure index gamma is coded: nested or all-subsets over q predictors.
struct StructureCodingScheme
{
    SearchScheme scheme = SearchScheme::AllSubsets;
    std::size_t q = 1;

    StructureCodingScheme() = default;
    StructureCodingScheme(SearchScheme scheme_, std::size_t q_);
};

/// kappa_k^k ~= 2^-k k pi^(1-k) exp(2 psi(1) - k), the quantization constant raised to k.
double kappa_pow(int k);

/// log|X'X| by column-pivoted QR; throws SingularDesignError on rank deficiency. 0 for p = 0.
double xtx_logdet(const Eigen::MatrixXd& Xs);

/// log of n^2 nu (nu+1)^(p+1) |X'X| / (2 (nu+3)^(p+2) tau^(p+3)); Gaussian limit at nu = inf.
double fisher_logdet(std::size_t n, std::size_t p, double tau, Dof nu, double xtx_log_det);

/**
 * log B, where B / tau^p is the bracketed term of I(beta | K):
 * B = [kappa_p pi K (nu+1)/(nu+3)]^p / Gamma(p/2 + 1)^2. Returns -inf for p = 0 or K = 0.
 */
double log_coefficient_volume(std::size_t p, HyperK K, Dof nu);

/// I(beta | K) = 0.5 log(1 + B / tau^p), evaluated in log space.
double assertion_beta(std::size_t p, HyperK K, double tau, Dof nu);

/// I(beta0, tau) from the standard Wallace-Freeman formula; does not depend on K.
double assertion_scale(std::size_t n, double tau, Dof nu);

/// Negative log-likelihood plus (p + 2) / 2.
double detail_length(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, double tau, Dof nu,
                     std::size_t p);

/// I(K) = 0.5 log n.
double hyper_k_length(std::size_t n);

/// log(q + 1) for nested coding; log C(q, p) + log(q + 1) for all subsets.
double structure_length(const StructureCodingScheme& coding, std::size_t p);

CodelengthBreakdown total_message_length(const Dataset& data, const ModelStructure& structure,
                                         const TParams& params, HyperK K,
                                         const StructureCodingScheme& coding);

/// The closed-form Gaussian criterion, term by term; requires params.nu to be Gaussian.
CodelengthBreakdown gaussian_message_length(const Dataset& data, const ModelStructure& structure,
                                            const TParams& params, HyperK K,
                                            const StructureCodingScheme& coding);

} // namespace mmlreg
