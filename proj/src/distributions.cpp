#include "mmlreg/distributions.hpp"

#include "mmlreg/detail/special.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

namespace mmlreg
{

TSpec::TSpec(double mu_, double tau_, Dof nu_) : mu{mu_}, tau{tau_}, nu{nu_}
{
    if (!(tau_ > 0.0) || !std::isfinite(tau_))
        throw InputError("t distribution scale must be positive and finite");
}

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// log f(x) = norm - shape * log1p((x - mu)^2 / (nu tau)), or the Gaussian form.
struct LogDensity
{
    explicit LogDensity(const TSpec& s) : mu{s.mu}, tau{s.tau}, gaussian{s.nu.is_gaussian()}
    {
        if (gaussian)
        {
            norm = -0.5 * std::log(2.0 * std::numbers::pi * tau);
        }
        else
        {
            const double nu = s.nu.value();
            norm = detail::log_gamma(0.5 * (nu + 1.0)) - detail::log_gamma(0.5 * nu) -
                   0.5 * std::log(std::numbers::pi * nu * tau);
            shape = 0.5 * (nu + 1.0);
            nu_tau = nu * tau;
        }
    }

    double operator()(double x) const
    {
        const double d = x - mu;
        if (gaussian)
            return norm - 0.5 * d * d / tau;
        return norm - shape * std::log1p(d * d / nu_tau);
    }

    double mu;
    double tau;
    bool gaussian;
    double norm = 0.0;
    double shape = 0.0;
    double nu_tau = 0.0;
};

boost::math::quadrature::sinh_sinh<double>& integrator()
{
    thread_local boost::math::quadrature::sinh_sinh<double> instance(12);
    return instance;
}

constexpr double kQuadratureAbsTol = 1e-8;

} // namespace

Rng::Rng(std::uint64_t seed) : seed_{seed}, engine_{splitmix64(seed)}
{
}

Rng Rng::substream(std::uint64_t index) const
{
    return Rng(splitmix64(seed_ ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

double t_logpdf(double y, const TSpec& spec)
{
    if (!std::isfinite(y))
        throw InputError("t_logpdf: non-finite argument");
    return LogDensity(spec)(y);
}

double neg_log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, double tau, Dof nu)
{
    if (y.size() != mu.size())
        throw InputError("neg_log_likelihood: y has " + std::to_string(y.size()) +
                         " entries but mu has " + std::to_string(mu.size()));
    if (!(tau > 0.0))
        throw InputError("neg_log_likelihood: tau must be positive");
    const auto n = static_cast<double>(y.size());
    if (nu.is_gaussian())
    {
        const double rss = (y - mu).squaredNorm();
        return 0.5 * n * std::log(2.0 * std::numbers::pi * tau) + 0.5 * rss / tau;
    }
    const double v = nu.value();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
    {
        const double r = y(i) - mu(i);
        sum += std::log1p(r * r / (v * tau));
    }
    return -n * detail::log_gamma(0.5 * (v + 1.0)) + n * detail::log_gamma(0.5 * v) +
           0.5 * n * std::log(std::numbers::pi * v * tau) + 0.5 * (v + 1.0) * sum;
}

double kl_divergence(const TSpec& p, const TSpec& q)
{
    // E_p[(x - mu)^2] is infinite for nu <= 2, and the Gaussian log-density is quadratic.
    if (q.nu.is_gaussian() && !p.nu.is_gaussian())
    {
        const double v = p.nu.value();
        if (v <= 2.0)
            return std::numeric_limits<double>::infinity();
        // Closed form: cross-entropy of a Gaussian minus the t entropy. Quadrature
        // struggles here as v -> 2 because the integrand decays only like |x|^(1-v).
        const double entropy =
            0.5 * (v + 1.0) * (boost::math::digamma(0.5 * (v + 1.0)) - boost::math::digamma(0.5 * v)) +
            0.5 * std::log(v) + detail::log_gamma(0.5 * v) + detail::log_gamma(0.5) -
            detail::log_gamma(0.5 * (v + 1.0)) + 0.5 * std::log(p.tau);
        const double second_moment = p.tau * v / (v - 2.0) + (p.mu - q.mu) * (p.mu - q.mu);
        const double cross = 0.5 * std::log(2.0 * std::numbers::pi * q.tau) + 0.5 * second_moment / q.tau;
        return std::max(0.0, cross - entropy);
    }

    const LogDensity log_p(p);
    const LogDensity log_q(q);
    const double scale = std::sqrt(std::max(p.tau, q.tau));
    auto integrand = [&](double u) {
        const double x = p.mu + scale * u;
        const double lp = log_p(x);
        if (lp < -745.0)
            return 0.0;
        const double lq = log_q(x);
        if (!std::isfinite(lq))
            return 0.0;
        return std::exp(lp) * (lp - lq);
    };

    double error = 0.0;
    double l1 = 0.0;
    std::size_t levels = 0;
    const double value = integrator().integrate(integrand, 1e-12, &error, &l1, &levels);
    if (!std::isfinite(value) || scale * error > kQuadratureAbsTol)
    {
        std::ostringstream os;
        os << "kl_divergence: quadrature did not converge (estimate " << scale * value
           << ", error " << scale * error << ", L1 " << scale * l1 << ", levels " << levels
           << ") for p=t(" << p.mu << ',' << p.tau << ',' << to_string(p.nu) << "), q=t(" << q.mu
           << ',' << q.tau << ',' << to_string(q.nu) << ')';
        throw NumericalError(os.str());
    }
    return std::max(0.0, scale * value);
}

double js_divergence(const TSpec& p, const TSpec& q)
{
    return 0.5 * kl_divergence(p, q) + 0.5 * kl_divergence(q, p);
}

namespace
{

double standard_js(double a, Dof b)
{
    return js_divergence(TSpec(0.0, 1.0, Dof(a)), TSpec(0.0, 1.0, b));
}

Dof dof_from_inverse(double s)
{
    return s <= 0.0 ? Dof::gaussian() : Dof(1.0 / s);
}

/**
 * Smallest b > a with js(t_a, t_b) = c, searched over s = 1/b so the Gaussian
 * end of the range is the finite point s = 0. Returns nullopt when even
 * b = nu_max is closer to t_a than c.
 */
std::optional<double> next_dof(double a, Dof nu_max, double c)
{
    const double s_far = nu_max.is_gaussian() ? 0.0 : 1.0 / nu_max.value();
    auto gap = [&](double s) { return standard_js(a, dof_from_inverse(s)) - c; };

    double s_lo = s_far;
    double f_lo = gap(s_lo);
    if (!std::isfinite(f_lo))
    {
        // Divergent endpoint: walk s towards 0 until the gap exceeds c.
        s_lo = 0.5 / a;
        f_lo = gap(s_lo);
        while (f_lo <= 0.0)
        {
            s_lo *= 0.5;
            if (s_lo < 1e-12)
                return std::nullopt;
            f_lo = gap(s_lo);
        }
    }
    if (f_lo <= 0.0)
        return std::nullopt;

    double s_hi = 1.0 / a;
    boost::math::tools::eps_tolerance<double> tol(45);
    std::uintmax_t max_iter = 200;
    auto [l, r] = boost::math::tools::toms748_solve(gap, s_lo, s_hi, f_lo, -c, tol, max_iter);
    if (max_iter >= 200)
        throw NumericalError("build_dof_grid: root-finder did not converge for a=" +
                             std::to_string(a));
    const double s = 0.5 * (l + r);
    if (!(s > 0.0))
        return std::nullopt;
    return 1.0 / s;
}

struct Chain
{
    std::vector<double> interior;
    double end_gap = 0.0; ///< js(a_{m-1}, nu_max) - c; -inf when the chain broke early
};

Chain chain_for(int m, double nu_min, Dof nu_max, double c)
{
    Chain chain;
    double a = nu_min;
    for (int i = 0; i < m - 2; ++i)
    {
        auto b = next_dof(a, nu_max, c);
        if (!b)
        {
            chain.end_gap = -std::numeric_limits<double>::infinity();
            return chain;
        }
        chain.interior.push_back(*b);
        a = *b;
    }
    chain.end_gap = standard_js(a, nu_max) - c;
    return chain;
}

} // namespace

DofGrid build_dof_grid(int m, double nu_min, Dof nu_max)
{
    if (m < 2)
        throw InputError("build_dof_grid: need at least 2 grid points, got " + std::to_string(m));
    if (!(nu_min > 0.0) || (!nu_max.is_gaussian() && nu_max.value() <= nu_min))
        throw InputError("build_dof_grid: require 0 < nu_min < nu_max");

    DofGrid grid;
    if (m == 2)
    {
        grid.values = {Dof(nu_min), nu_max};
        grid.js_step = standard_js(nu_min, nu_max);
        return grid;
    }

    double lo = 0.0;
    double hi = 0.5;
    while (chain_for(m, nu_min, nu_max, hi).end_gap > 0.0)
    {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6)
            throw NumericalError("build_dof_grid: could not bracket the common divergence");
    }

    Chain best;
    for (int iter = 0; iter < 200 && hi - lo > 1e-10 * hi; ++iter)
    {
        const double mid = 0.5 * (lo + hi);
        Chain chain = chain_for(m, nu_min, nu_max, mid);
        if (chain.end_gap > 0.0)
            lo = mid;
        else
            hi = mid;
        if (chain.interior.size() == static_cast<std::size_t>(m - 2))
            best = std::move(chain);
    }

    const double c = 0.5 * (lo + hi);
    Chain chain = chain_for(m, nu_min, nu_max, c);
    if (chain.interior.size() != static_cast<std::size_t>(m - 2))
        chain = std::move(best);
    if (chain.interior.size() != static_cast<std::size_t>(m - 2))
        throw NumericalError("build_dof_grid: bisection on the common divergence failed");

    grid.values.push_back(Dof(nu_min));
    for (double a : chain.interior)
        grid.values.push_back(Dof(a));
    grid.values.push_back(nu_max);
    grid.js_step = c;

    for (std::size_t i = 1; i < grid.values.size(); ++i)
        if (!(grid.values[i].value() > grid.values[i - 1].value()))
            throw NumericalError("build_dof_grid: grid is not increasing; divergence is not "
                                 "monotone in the degrees of freedom");
    return grid;
}

DofGrid published_dof_grid()
{
    DofGrid grid;
    grid.values = {Dof(1.0), Dof(1.9), Dof(5.0), Dof::gaussian()};
    grid.js_step = standard_js(1.0, Dof(1.9));
    return grid;
}

Eigen::VectorXd sample_t(std::size_t n, const TSpec& spec, Rng& rng)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(spec.tau);
    if (spec.nu.is_gaussian())
    {
        for (auto& x : out)
            x = spec.mu + sd * normal(rng.engine());
        return out;
    }
    const double nu = spec.nu.value();
    std::gamma_distribution<double> mixing(0.5 * nu, 2.0 / nu);
    for (auto& x : out)
    {
        const double z = normal(rng.engine());
        const double w = mixing(rng.engine());
        x = spec.mu + sd * z / std::sqrt(w);
    }
    return out;
}

} // namespace mmlreg
