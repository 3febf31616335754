#include "mmlreg/distributions.hpp"
#include "mmlreg/search.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

using namespace mmlreg;

namespace
{

SelectionReport mml_select(const Dataset& data, SearchScheme scheme, unsigned workers = 1)
{
    SelectOptions options;
    options.workers = workers;
    return select(data, enumerate_structures(data.q(), scheme), published_dof_grid().values, Criterion::MML,
                  StructureCodingScheme(scheme, data.q()), options);
}

} // namespace

TEST_CASE("structure enumeration")
{
    const auto nested = enumerate_structures(3, SearchScheme::Nested);
    REQUIRE(nested.size() == 4);
    CHECK(nested[0].size() == 0);
    CHECK(nested[3].gamma() == std::vector<std::size_t>{0, 1, 2});

    const auto all = enumerate_structures(3, SearchScheme::AllSubsets);
    REQUIRE(all.size() == 8);
    CHECK(all[0].size() == 0);
    CHECK(all[5].gamma() == std::vector<std::size_t>{0, 2});
    CHECK(enumerate_structures(13, SearchScheme::AllSubsets).size() == 8192);
    CHECK_THROWS_AS(enumerate_structures(26, SearchScheme::AllSubsets), InputError);
}

TEST_CASE("lasso path matches soft thresholding on orthonormal designs")
{
    for (std::uint64_t seed : {1u, 2u, 3u})
    {
        const Eigen::MatrixXd Z = oracle::orthonormal_design(80, 6, seed);
        std::mt19937_64 gen(seed + 100);
        std::normal_distribution<double> normal;
        Eigen::VectorXd beta(6);
        beta << 3.0, -2.0, 1.0, 0.5, 0.0, 0.0;
        Eigen::VectorXd y = Z * beta;
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y(i) += 0.7 * normal(gen);

        const Dataset data(y, Z, oracle::names(6));
        const auto path = lasso_path_structures(data, 100);
        const auto expected = oracle::orthonormal_lasso_supports(Z, y, 100);
        REQUIRE(path.size() == expected.size());
        for (std::size_t k = 0; k < path.size(); ++k)
            CHECK(path[k].gamma() == expected[k]);
    }
}

TEST_CASE("lasso path starts empty and grows")
{
    const auto inst = oracle::random_instance(50, 8, 3, 1.0, 1.0, 5.0, 31);
    const auto path = lasso_path_structures(oracle::dataset(inst));
    CHECK(path.front().size() == 0);
    CHECK(path.size() > 2);
    CHECK_THROWS_AS(lasso_path_structures(oracle::dataset(inst), 0), InputError);
}

TEST_CASE("posteriors and marginal inclusion")
{
    const auto p = model_posteriors({10.0, 10.0});
    CHECK(p[0] == doctest::Approx(0.5));
    const auto m = marginal_inclusion(p, {ModelStructure::subset({0}), ModelStructure::subset({0, 1})}, 2);
    CHECK(m[0] == doctest::Approx(1.0));
    CHECK(m[1] == doctest::Approx(0.5));

    const auto q = model_posteriors({1000.0, 1001.0, std::numeric_limits<double>::infinity()});
    CHECK(q[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
    CHECK(q[2] == 0.0);
    CHECK_THROWS_AS(model_posteriors({}), InputError);
    CHECK_THROWS_AS(model_posteriors({std::nan("")}), InputError);
    CHECK_THROWS_AS(marginal_inclusion({1.0}, {}, 1), InputError);

    // Uniform mass over all subsets gives one half everywhere.
    const auto all = enumerate_structures(4, SearchScheme::AllSubsets);
    const auto uniform = model_posteriors(std::vector<double>(all.size(), 3.0));
    for (double v : marginal_inclusion(uniform, all, 4))
        CHECK(v == doctest::Approx(0.5));

    // Permuting candidates permutes posteriors.
    const std::vector<double> codes{5.0, 3.0, 4.5, 9.0};
    const auto base = model_posteriors(codes);
    const auto perm = model_posteriors({codes[2], codes[0], codes[3], codes[1]});
    CHECK(perm[0] == base[2]);
    CHECK(perm[1] == base[0]);
    CHECK(perm[2] == base[3]);
    CHECK(perm[3] == base[1]);
}

TEST_CASE("nested selection on a small problem ranks every candidate")
{
    const auto inst = oracle::random_instance(40, 3, 1, 2.0, 1.0, 5.0, 41);
    const Dataset data = oracle::dataset(inst);
    SelectOptions options;
    options.workers = 1;
    const auto report = select(data, enumerate_structures(3, SearchScheme::Nested), {Dof(5)}, Criterion::MML,
                               StructureCodingScheme(SearchScheme::Nested, 3), options);
    CHECK(report.ranked.size() == 4);
    for (std::size_t k = 1; k < report.ranked.size(); ++k)
        CHECK(report.ranked[k - 1].score <= report.ranked[k].score);
    CHECK(report.best().structure.contains(0));
}

TEST_CASE("criteria rank by their own scores")
{
    const auto inst = oracle::random_instance(40, 3, 2, 1.0, 1.0, 5.0, 42);
    const Dataset data = oracle::dataset(inst);
    const auto structures = enumerate_structures(3, SearchScheme::AllSubsets);
    const auto reports = select_many(data, structures, published_dof_grid().values,
                                     {Criterion::MML, Criterion::BIC, Criterion::AICc, Criterion::MDL},
                                     StructureCodingScheme(SearchScheme::AllSubsets, 3));
    REQUIRE(reports.size() == 4);
    for (const auto& c : reports[1].ranked)
        CHECK(c.score == doctest::Approx(bic(c.fit.objective, c.structure.size() + 2, 40)));
    for (const auto& c : reports[3].ranked)
        CHECK(c.nu.is_gaussian());
    CHECK(reports[0].ranked.size() == 32);
    CHECK(reports[3].ranked.size() == 8);
}

TEST_CASE("a dominant predictor has marginal inclusion near one")
{
    auto inst = oracle::random_instance(60, 4, 0, 0.0, 1.0, std::numeric_limits<double>::infinity(), 43);
    inst.y += 5.0 * inst.X.col(2);
    const auto report = mml_select(oracle::dataset(inst), SearchScheme::AllSubsets);
    CHECK(report.marginal_inclusion[2] > 0.999);
}

TEST_CASE("selection does not depend on worker count")
{
    const auto inst = oracle::random_instance(40, 5, 2, 1.0, 1.0, 3.0, 44);
    const Dataset data = oracle::dataset(inst);
    const auto serial = mml_select(data, SearchScheme::AllSubsets, 1);
    const auto parallel = mml_select(data, SearchScheme::AllSubsets, 4);
    REQUIRE(serial.ranked.size() == parallel.ranked.size());
    for (std::size_t k = 0; k < serial.ranked.size(); ++k)
    {
        CHECK(serial.ranked[k].score == parallel.ranked[k].score);
        CHECK(serial.ranked[k].structure == parallel.ranked[k].structure);
    }
    CHECK(serial.marginal_inclusion == parallel.marginal_inclusion);
}

TEST_CASE("MML selection is invariant to affine rescaling of the response")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const auto inst = oracle::random_instance(40, 4, 2, 0.8, 1.0, 3.0, 500 + seed);
        const auto base = mml_select(oracle::dataset(inst), SearchScheme::AllSubsets);
        for (auto [c, d] : {std::pair{0.1, -5.0}, std::pair{10.0, 7.0}})
        {
            auto moved = inst;
            moved.y = (c * inst.y.array() + d).matrix();
            const auto report = mml_select(oracle::dataset(moved), SearchScheme::AllSubsets);
            CHECK(report.best().structure == base.best().structure);
            CHECK(report.best().nu == base.best().nu);
        }
    }
}

TEST_CASE("MML selection is invariant to span-preserving design transformations")
{
    const auto inst = oracle::random_instance(50, 4, 2, 1.0, 1.0, 5.0, 45);
    const auto base = mml_select(oracle::dataset(inst), SearchScheme::Nested);

    // Upper-triangular recombination keeps the span of every leading block of columns.
    Eigen::Matrix4d A;
    A << 1.0, 0.5, -2.0, 0.3, 0.0, 3.0, 1.0, 0.0, 0.0, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, 2.0;
    auto moved = inst;
    moved.X = inst.X * A;
    const auto report = mml_select(oracle::dataset(moved), SearchScheme::Nested);
    CHECK(report.best().structure == base.best().structure);
    CHECK(report.best().score == doctest::Approx(base.best().score).epsilon(1e-9));
}

TEST_CASE("true support is recovered at high SNR")
{
    const auto unit = oracle::random_instance(50, 8, 3, 1.0, 1.0, std::numeric_limits<double>::infinity(), 46);
    const Eigen::VectorXd noise = unit.y - (Eigen::VectorXd::Constant(50, 1.5) + unit.X.leftCols(3).rowwise().sum());
    for (double tau : {1e-4, 1e-6})
    {
        auto inst = unit;
        inst.y = Eigen::VectorXd::Constant(50, 1.5) + unit.X.leftCols(3).rowwise().sum() + std::sqrt(tau) * noise;
        const auto report = mml_select(oracle::dataset(inst), SearchScheme::AllSubsets);
        CHECK(report.best().structure == ModelStructure::subset({0, 1, 2}));
    }
}
