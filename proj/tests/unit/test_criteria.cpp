#include "mmlreg/criteria.hpp"
#include "mmlreg/estimation.hpp"
#include "mmlreg/simulation.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace mmlreg;

TEST_CASE("bic and aicc follow the nit convention")
{
    CHECK(bic(100.0, 3, 50) == doctest::Approx(100.0 + 1.5 * std::log(50.0)));
    CHECK(bic(100.0, 0, 50) == 100.0);
    CHECK(aicc(100.0, 3, 50) == doctest::Approx(103.52173913043478));
    CHECK(aicc(100.0, 0, 50) == 100.0);
    CHECK(aicc(100.0, 3, 1000000000) == doctest::Approx(103.0).epsilon(1e-9));
    CHECK_THROWS_AS(aicc(1.0, 5, 6), InputError);

    for (std::size_t k = 1; k < 6; ++k)
    {
        CHECK(bic(10.0, k, 30) > bic(10.0, k - 1, 30));
        CHECK(aicc(10.0, k, 30) > aicc(10.0, k - 1, 30));
        CHECK(bic(10.5, k, 30) > bic(10.0, k, 30));
        CHECK(aicc(10.5, k, 30) > aicc(10.0, k, 30));
    }
}

TEST_CASE("criterion names round-trip")
{
    for (Criterion c : {Criterion::MML, Criterion::BIC, Criterion::AICc, Criterion::MDL})
        CHECK(parse_criterion(to_string(c)) == c);
    CHECK_THROWS_AS(parse_criterion("aic"), InputError);
}

TEST_CASE("mdl_denoising matches a high-precision transcription")
{
    // mpmath, 50 digits.
    CHECK(mdl_denoising(1.0, 2.0, 50, 3) == doctest::Approx(79.83048165269286981177667).epsilon(1e-13));
    CHECK_THROWS_AS(mdl_denoising(1.0, 2.0, 50, 0), InputError);
    CHECK_THROWS_AS(mdl_denoising(1.0, 2.0, 4, 3), InputError);
    CHECK_THROWS_AS(mdl_denoising(1.0, 0.0, 50, 3), InputError);

    const double nn = 50.0;
    const double expected_null = 0.5 * 49.0 * std::log(2.0 / 49.0) + 0.5 * std::log(49.0) +
                                 0.5 * nn * std::log(2.0 * nn * std::numbers::pi * std::numbers::e) - 3.0 * std::log(2.0);
    CHECK(mdl_null_model(2.0, 50) == doctest::Approx(expected_null));
}

TEST_CASE("MDL penalty can go negative at low SNR while the MML assertion cannot")
{
    // (p+1)/2 log(R / (p+1)) with R tiny.
    const double low = mdl_denoising(1.0, 1e-4, 50, 3) - mdl_denoising(1.0, 4.0, 50, 3);
    CHECK(low < 0.0);
}

TEST_CASE("MML minus MDL differs from the closed-form gap by a K-independent amount")
{
    // The closed-form gap drops constants that depend on n and p, so compare
    // its K-dependence only: at fixed (n, p) the residual must not move with SNR.
    for (std::size_t p : {1u, 3u, 6u})
    {
        std::vector<double> residuals;
        for (double signal : {3.0, 10.0, 30.0})
        {
            Rng rng(700 + p);
            const Eigen::MatrixXd X = generate_design(2000, p, 0.0, rng);
            std::vector<std::size_t> support(p);
            std::iota(support.begin(), support.end(), std::size_t{0});
            const Eigen::VectorXd y = generate_response(X, support, signal, 1.0, 1.0, Dof::gaussian(), rng);
            const Dataset data(y, X, oracle::names(p));
            const auto s = ModelStructure::subset(support);
            const FitResult mml = mml_fit(data, s, Dof::gaussian(), {}, StructureCodingScheme(SearchScheme::Nested, p));
            const FitResult ml = ml_fit(data, s, Dof::gaussian());
            const double n = 2000.0;
            const double pp = static_cast<double>(p);
            const double tau_hat = ml.params.tau * n / (n - pp - 1.0);
            const double diff = (mml.objective - mml.breakdown->structure) -
                                mdl_denoising(tau_hat, ml.K.value / n, 2000, p);
            const double gap = -0.5 * std::log(ml.K.value) +
                               0.5 * (std::log(n * pp / (pp + 2.0)) + pp * std::log((pp + 1.0) / (pp + 2.0)));
            residuals.push_back(diff - gap);
        }
        CHECK(std::abs(residuals[1] - residuals[0]) < 0.05);
        CHECK(std::abs(residuals[2] - residuals[0]) < 0.05);
    }
}
