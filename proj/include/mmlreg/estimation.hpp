#pragma once

/** @file
 * Maximum likelihood and minimum message length estimation of Student-t
 * regression parameters for a fixed structure and degrees of freedom.
 *
 * Both estimators use the normal scale-mixture form of the t distribution:
 * the E-step computes per-observation weights (nu+1)/(nu+delta_i^2), the
 * M-step solves a weighted least squares problem for (beta0, beta) and then
 * updates tau. For ML the tau update is wss/n; for MML it minimizes
 *
 *     0.5 log(1 + B/tau^p) + ((n-1)/2) log tau + wss/(2 tau)
 *
 * which is convex in log tau and bracketed by wss/(n-1) and wss/(n-p-1).
 */

#include "mmlreg/codelength.hpp"
#include "mmlreg/core.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace mmlreg
{

struct EMConfig
{
    int max_iter = 500;
    double rel_tol = 1e-8;

    void validate() const;
};

struct FitResult
{
    TParams params;
    HyperK K;
    /// Message length in nits (MML fits) or negative log-likelihood (ML fits).
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Objective after the initial point and after every EM iteration.
    std::vector<double> trace;
    /// Full codelength breakdown; MML fits only.
    std::optional<CodelengthBreakdown> breakdown;
};

struct WlsSolution
{
    double beta0 = 0.0;
    Eigen::VectorXd beta;
};

/// argmin sum_i w_i (y_i - beta0 - x_i' beta)^2 via a Cholesky factorization of the
/// column-equilibrated weighted normal equations.
WlsSolution wls_fit(const Eigen::MatrixXd& Xs, const Eigen::VectorXd& y, const Eigen::VectorXd& w);

/// E-step weights (nu+1)/(nu + (y_i-mu_i)^2/tau); all ones in the Gaussian limit.
Eigen::VectorXd em_weights(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, double tau, Dof nu);

/// K = (Xs beta)'(Xs beta), the fitted sum of squares of the ML coefficients.
HyperK estimate_K(const Eigen::MatrixXd& Xs, const Eigen::VectorXd& beta_ml);

/// MML update of tau given the weighted residual sum of squares.
double optimize_tau(double wss, std::size_t n, std::size_t p, double B);

/// Same as optimize_tau with B given on the log scale (-inf for B = 0).
double optimize_tau_log(double wss, std::size_t n, std::size_t p, double log_b);

/// Student-t maximum likelihood by EM with nu held fixed.
FitResult ml_fit(const Dataset& data, const ModelStructure& structure, Dof nu,
                 const EMConfig& config = {});

/**
 * MML estimates for a fixed structure and nu. K is estimated from the ML fit
 * of the same structure and nu, then held fixed while EM minimizes the
 * message length. @p coding defaults to the structure's own scheme over the
 * dataset's q predictors.
 */
FitResult mml_fit(const Dataset& data, const ModelStructure& structure, Dof nu,
                  const EMConfig& config = {},
                  std::optional<StructureCodingScheme> coding = std::nullopt);

/// MML estimates with an externally supplied K (e.g. from a cached ML fit).
FitResult mml_fit_with_k(const Dataset& data, const ModelStructure& structure, Dof nu, HyperK K,
                         const EMConfig& config, const StructureCodingScheme& coding);

/// Coding scheme implied by a structure when none is given explicitly.
StructureCodingScheme default_coding(const Dataset& data, const ModelStructure& structure);

} // namespace mmlreg
