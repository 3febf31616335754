#pragma once

/** @file
 * Student-t densities, divergences between t distributions, the
 * Jensen-Shannon equidistant degrees-of-freedom grid, and sampling.
 */

#include "mmlreg/core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace mmlreg
{

/// Location-scale Student-t; tau is the squared scale.
struct TSpec
{
    double mu = 0.0;
    double tau = 1.0;
    Dof nu = Dof::gaussian();

    TSpec() = default;
    TSpec(double mu_, double tau_, Dof nu_);
};

/**
 * Seeded generator that can be split into independent, reproducible substreams.
 *
 * Substream seeds are derived from (seed, index) with SplitMix64, so any
 * replication can be regenerated without replaying the ones before it.
 */
class Rng
{
public:
    explicit Rng(std::uint64_t seed);

    Rng substream(std::uint64_t index) const;

    std::mt19937_64& engine() noexcept { return engine_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// log f(y | mu, tau, nu). At nu = inf this is the N(mu, tau) log-density.
double t_logpdf(double y, const TSpec& spec);

/// -sum_i log f(y_i | mu_i, tau, nu).
double neg_log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, double tau, Dof nu);

/// KL(p || q) by double-exponential quadrature over the real line.
/// Returns +inf when the integral diverges (p with nu <= 2 against a Gaussian q).
double kl_divergence(const TSpec& p, const TSpec& q);

/// Symmetrized divergence 0.5 KL(p||q) + 0.5 KL(q||p).
double js_divergence(const TSpec& p, const TSpec& q);

/// Candidate degrees of freedom, consecutive members equidistant in js_divergence.
struct DofGrid
{
    std::vector<Dof> values;
    double js_step = 0.0;
};

/**
 * Solves for m ordered degrees of freedom nu_min = a_1 < ... < a_m = nu_max such
 * that js_divergence(t_{a_i}, t_{a_{i+1}}) is the same for every neighbouring
 * pair of standard t distributions.
 *
 * The common gap c is found by bisection; for a given c the interior points are
 * chained forward with a bracketed root-finder, and the sign of the final gap
 * mismatch drives the bisection.
 */
DofGrid build_dof_grid(int m, double nu_min = 1.0,
                       Dof nu_max = Dof::gaussian());

/// The four-point grid used by the experiments, rounded as published: {1, 1.9, 5, inf}.
DofGrid published_dof_grid();

/// Draws normal / sqrt(gamma) scale mixtures.
Eigen::VectorXd sample_t(std::size_t n, const TSpec& spec, Rng& rng);

} // namespace mmlreg
