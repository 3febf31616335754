#include "mmlreg/distributions.hpp"

#include "../support/oracles.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <doctest.h>

using namespace mmlreg;

TEST_CASE("t_logpdf matches high-precision values")
{
    // mpmath, 50 digits.
    CHECK(t_logpdf(1.3, TSpec(0.2, 2.5, Dof(3))) == doctest::Approx(-1.75817175620488058523319).epsilon(1e-13));
    CHECK(t_logpdf(-40, TSpec(1.0, 0.5, Dof(1))) == doctest::Approx(-8.918745007309697121455134).epsilon(1e-13));
    CHECK_THROWS_AS(t_logpdf(std::nan(""), TSpec()), InputError);
    CHECK_THROWS_AS(TSpec(0.0, 0.0, Dof(1)), InputError);
}

TEST_CASE("t density integrates to one")
{
    boost::math::quadrature::tanh_sinh<double> integrator;
    for (double nu : {1.0, 1.9, 5.0, 30.0})
    {
        const TSpec spec(0.7, 2.0, Dof(nu));
        auto f = [&](double u) {
            // x = 0.7 + u / (1 - u^2) maps (-1, 1) onto the line.
            const double x = 0.7 + u / (1.0 - u * u);
            const double jac = (1.0 + u * u) / ((1.0 - u * u) * (1.0 - u * u));
            return std::exp(t_logpdf(x, spec)) * jac;
        };
        CHECK(integrator.integrate(f, -1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("large dof approaches the Gaussian density")
{
    for (double y : {-3.0, 0.0, 0.4, 2.5})
        CHECK(t_logpdf(y, TSpec(0.1, 1.7, Dof(1e8))) ==
              doctest::Approx(t_logpdf(y, TSpec(0.1, 1.7, Dof::gaussian()))).epsilon(1e-7));
}

TEST_CASE("neg_log_likelihood equals minus the summed log densities")
{
    const auto inst = oracle::random_instance(40, 2, 2, 1.0, 1.3, 3.0, 11);
    Eigen::VectorXd mu = inst.y * 0.8;
    for (double nu : {1.0, 1.9, 5.0, std::numeric_limits<double>::infinity()})
    {
        const Dof d = std::isinf(nu) ? Dof::gaussian() : Dof(nu);
        double expected = 0.0;
        for (Eigen::Index i = 0; i < mu.size(); ++i)
            expected -= oracle::t_logpdf(inst.y(i), mu(i), 1.3, nu);
        CHECK(neg_log_likelihood(inst.y, mu, 1.3, d) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK_THROWS_AS(neg_log_likelihood(inst.y, mu.head(3), 1.0, Dof(1)), InputError);
}

TEST_CASE("kl_divergence matches high-precision quadrature values")
{
    // mpmath quad at 30 digits.
    const Dof g = Dof::gaussian();
    CHECK(kl_divergence(TSpec(0, 1, Dof(1)), TSpec(0, 1, Dof(1.9))) == doctest::Approx(0.096616013275860379495).epsilon(1e-9));
    CHECK(kl_divergence(TSpec(0, 1, Dof(1.9)), TSpec(0, 1, Dof(1))) == doctest::Approx(0.055465307314567285927).epsilon(1e-9));
    CHECK(kl_divergence(TSpec(0, 1, g), TSpec(0, 1, Dof(1))) == doctest::Approx(0.25924453248886226362).epsilon(1e-9));
    CHECK(kl_divergence(TSpec(0, 1, Dof(5)), TSpec(0, 1, g)) == doctest::Approx(0.12476919412361009402).epsilon(1e-9));
    CHECK(kl_divergence(TSpec(0.3, 2, Dof(3)), TSpec(-0.2, 1.5, g)) == doctest::Approx(1.0849532584488246633).epsilon(1e-9));
    CHECK(kl_divergence(TSpec(0, 1, Dof(2.05)), TSpec(0, 1, g)) == doctest::Approx(19.472437818886184596).epsilon(1e-9));
    CHECK(kl_divergence(TSpec(1, 2, Dof(4)), TSpec(-1, 0.5, Dof(7))) == doctest::Approx(2.1619426121804980694).epsilon(1e-9));
}

TEST_CASE("kl_divergence basic properties")
{
    CHECK(kl_divergence(TSpec(0.5, 2, Dof(3)), TSpec(0.5, 2, Dof(3))) == doctest::Approx(0.0).epsilon(1e-10));
    // A Gaussian cannot code heavy tails with finite second moment.
    CHECK(std::isinf(kl_divergence(TSpec(0, 1, Dof(1)), TSpec(0, 1, Dof::gaussian()))));
    CHECK(std::isinf(kl_divergence(TSpec(0, 1, Dof(2)), TSpec(0, 1, Dof::gaussian()))));
    const double js = js_divergence(TSpec(0, 1, Dof(1)), TSpec(0, 1, Dof(5)));
    CHECK(js == doctest::Approx(js_divergence(TSpec(0, 1, Dof(5)), TSpec(0, 1, Dof(1)))));
    CHECK(js > 0.0);
}

TEST_CASE("kl_divergence agrees with a Monte-Carlo oracle")
{
    const double inf = std::numeric_limits<double>::infinity();
    struct Case
    {
        double nu_p, nu_q;
    };
    // Pairs whose log-ratio has enough moments for the sample standard error to be trustworthy.
    for (const Case c : {Case{1.0, 1.9}, Case{inf, 1.0}, Case{3.0, 8.0}})
    {
        const auto mc = oracle::mc_kl(0.0, 1.0, c.nu_p, 0.0, 1.0, c.nu_q, 2000000, 99);
        const Dof p = std::isinf(c.nu_p) ? Dof::gaussian() : Dof(c.nu_p);
        const Dof q = std::isinf(c.nu_q) ? Dof::gaussian() : Dof(c.nu_q);
        CHECK(std::abs(kl_divergence(TSpec(0, 1, p), TSpec(0, 1, q)) - mc.mean) < 3.0 * mc.std_error);
    }
}

TEST_CASE("dof grid has the published shape at m = 4")
{
    const DofGrid grid = build_dof_grid(4);
    REQUIRE(grid.values.size() == 4);
    CHECK(grid.values[0].value() == doctest::Approx(1.0));
    CHECK(grid.values[1].value() >= 1.85);
    CHECK(grid.values[1].value() <= 1.95);
    CHECK(grid.values[2].value() >= 4.8);
    CHECK(grid.values[2].value() <= 5.2);
    CHECK(grid.values[3].is_gaussian());

    // Consecutive members are JS-equidistant.
    for (std::size_t k = 0; k + 1 < grid.values.size(); ++k)
        CHECK(js_divergence(TSpec(0, 1, grid.values[k]), TSpec(0, 1, grid.values[k + 1])) ==
              doctest::Approx(grid.js_step).epsilon(1e-6));
}

TEST_CASE("dof grid edge cases")
{
    const DofGrid two = build_dof_grid(2);
    CHECK(two.values.size() == 2);
    CHECK(two.values[1].is_gaussian());
    CHECK(std::isinf(two.js_step));
    CHECK_THROWS_AS(build_dof_grid(1), InputError);

    for (int m : {3, 5, 6})
    {
        const DofGrid g = build_dof_grid(m);
        REQUIRE(g.values.size() == static_cast<std::size_t>(m));
        for (std::size_t k = 0; k + 1 < g.values.size(); ++k)
            CHECK(g.values[k].value() < g.values[k + 1].value());
    }

    const DofGrid bounded = build_dof_grid(4, 1.0, Dof(30.0));
    CHECK(bounded.values.back().value() == doctest::Approx(30.0));
    for (std::size_t k = 0; k + 1 < bounded.values.size(); ++k)
        CHECK(js_divergence(TSpec(0, 1, bounded.values[k]), TSpec(0, 1, bounded.values[k + 1])) ==
              doctest::Approx(bounded.js_step).epsilon(1e-6));

    const auto published = published_dof_grid().values;
    CHECK(published.size() == 4);
    CHECK(published[1].value() == 1.9);
    CHECK(published[2].value() == 5.0);
}

TEST_CASE("Rng substreams are reproducible and distinct")
{
    const Rng root(42);
    Rng a = root.substream(3);
    Rng b = root.substream(3);
    Rng c = root.substream(4);
    const auto x = a.engine()();
    CHECK(x == b.engine()());
    CHECK(x != c.engine()());
}

TEST_CASE("sample_t moments")
{
    Rng rng(5);
    const Eigen::VectorXd g = sample_t(400000, TSpec(1.0, 4.0, Dof::gaussian()), rng);
    CHECK(g.mean() == doctest::Approx(1.0).epsilon(0.01));
    CHECK((g.array() - g.mean()).square().mean() == doctest::Approx(4.0).epsilon(0.02));

    // Var t_nu = tau nu / (nu - 2).
    const Eigen::VectorXd t = sample_t(400000, TSpec(0.0, 1.0, Dof(6)), rng);
    CHECK(t.array().square().mean() == doctest::Approx(1.5).epsilon(0.03));

    // Median absolute value of a standard Cauchy is 1.
    Eigen::VectorXd c = sample_t(200001, TSpec(0.0, 1.0, Dof(1)), rng).cwiseAbs();
    std::nth_element(c.data(), c.data() + 100000, c.data() + c.size());
    CHECK(c(100000) == doctest::Approx(1.0).epsilon(0.02));
}
