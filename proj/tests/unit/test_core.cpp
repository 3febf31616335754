#include "mmlreg/core.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace mmlreg;

namespace
{

std::filesystem::path write_temp(const std::string& name, const std::string& content)
{
    const auto path = std::filesystem::temp_directory_path() / ("mmlreg_test_" + name);
    std::ofstream(path) << content;
    return path;
}

} // namespace

TEST_CASE("Dof validates and compares")
{
    CHECK_THROWS_AS(Dof(0.0), InputError);
    CHECK_THROWS_AS(Dof(-1.0), InputError);
    CHECK(Dof::gaussian().is_gaussian());
    CHECK(std::isinf(Dof::gaussian().value()));
    CHECK(Dof(1.9) == Dof(1.9));
    CHECK_FALSE(Dof(1.9) == Dof::gaussian());
    CHECK(to_string(Dof::gaussian()) == "inf");
    CHECK(to_string(Dof(1.9)) == "1.9");
}

TEST_CASE("parse_dof accepts numbers and Gaussian spellings")
{
    CHECK(parse_dof("inf").is_gaussian());
    CHECK(parse_dof("gaussian").is_gaussian());
    CHECK(parse_dof("1.9").value() == doctest::Approx(1.9));
    CHECK_THROWS_AS(parse_dof("abc"), InputError);
    CHECK_THROWS_AS(parse_dof("0"), InputError);
    CHECK_THROWS_AS(parse_dof("2x"), InputError);
}

TEST_CASE("schemes parse")
{
    CHECK(parse_scheme("nested") == SearchScheme::Nested);
    CHECK(parse_scheme("subsets") == SearchScheme::AllSubsets);
    CHECK(parse_scheme("all-subsets") == SearchScheme::AllSubsets);
    CHECK_THROWS_AS(parse_scheme("greedy"), InputError);
}

TEST_CASE("ModelStructure sorts and rejects duplicates")
{
    const auto s = ModelStructure::subset({3, 0, 2});
    CHECK(s.gamma() == std::vector<std::size_t>{0, 2, 3});
    CHECK(s.size() == 3);
    CHECK(s.contains(2));
    CHECK_FALSE(s.contains(1));
    CHECK_THROWS_AS(ModelStructure::subset({1, 1}), InputError);

    const auto n3 = ModelStructure::nested(3);
    CHECK(n3.gamma() == std::vector<std::size_t>{0, 1, 2});
    CHECK(n3.scheme() == SearchScheme::Nested);
    CHECK(ModelStructure::nested(0).size() == 0);
    CHECK(lexicographic_less(ModelStructure::subset({0, 2}), ModelStructure::subset({1})));
}

TEST_CASE("Dataset centers predictors and keeps means")
{
    Eigen::MatrixXd X(4, 2);
    X << 1, 10, 2, 20, 3, 30, 4, 40;
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 5;
    const Dataset d(y, X, {"a", "b"});
    CHECK(d.n() == 4);
    CHECK(d.q() == 2);
    CHECK(d.column_means()(0) == doctest::Approx(2.5));
    CHECK(d.X().col(1).sum() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.raw_X().isApprox(X));
    CHECK(d.column_index("b") == 1);
    CHECK_THROWS_AS(d.column_index("c"), InputError);

    const Dataset sub = d.subset_rows({0, 1, 3});
    CHECK(sub.n() == 3);
    CHECK(sub.column_means()(0) == doctest::Approx(7.0 / 3.0));
    CHECK(sub.X().col(0).sum() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("Dataset rejects malformed input")
{
    Eigen::MatrixXd X(2, 1);
    X << 1, 2;
    Eigen::VectorXd y(2);
    y << 1, 2;
    CHECK_THROWS_AS(Dataset(y, X, {"a"}), InputError); // n < 3

    Eigen::MatrixXd X3(3, 1);
    X3 << 1, 2, std::nan("");
    Eigen::VectorXd y3(3);
    y3 << 1, 2, 3;
    CHECK_THROWS_AS(Dataset(y3, X3, {"a"}), InputError);
    X3(2, 0) = 3;
    CHECK_THROWS_AS(Dataset(y3, X3, {"a", "b"}), InputError);
}

TEST_CASE("load_dataset reads CSV and validates cells")
{
    const auto good = write_temp("good.csv", "a,\"b\",y\n1,2,3\n4, 5 ,6\n7,8,9.5\n");
    const Dataset d = load_dataset(good, "y");
    CHECK(d.n() == 3);
    CHECK(d.names() == std::vector<std::string>{"a", "b"});
    CHECK(d.y()(2) == doctest::Approx(9.5));
    CHECK(d.raw_X()(1, 1) == doctest::Approx(5.0));

    CHECK_THROWS_AS(load_dataset(good, "z"), InputError);
    CHECK_THROWS_AS(load_dataset(write_temp("text.csv", "a,y\n1,2\nx,3\n4,5\n"), "y"), InputError);
    CHECK_THROWS_AS(load_dataset(write_temp("missing.csv", "a,y\n1,2\n,3\n4,5\n"), "y"), InputError);
    CHECK_THROWS_AS(load_dataset(write_temp("short.csv", "a,y\n1,2\n3,4\n"), "y"), InputError);
    CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv", "y"), InputError);
}

TEST_CASE("write_dataset round-trips through load_dataset")
{
    Eigen::MatrixXd X(3, 2);
    X << 1, -1, 2, 0.5, 4, 3;
    Eigen::VectorXd y(3);
    y << 0.1, 0.2, 0.4;
    const Dataset d(y, X, {"u", "v"}, "resp");
    const auto path = std::filesystem::temp_directory_path() / "mmlreg_test_roundtrip.csv";
    write_dataset(path, d);
    const Dataset back = load_dataset(path, "resp");
    CHECK(back.y().isApprox(d.y()));
    CHECK(back.X().isApprox(d.X()));
}

TEST_CASE("submatrix selects centered columns in gamma order")
{
    Eigen::MatrixXd X(3, 3);
    X << 1, 2, 3, 4, 5, 6, 7, 8, 10;
    const Dataset d(Eigen::VectorXd::LinSpaced(3, 0, 1), X, {"a", "b", "c"});
    const Eigen::MatrixXd S = submatrix(d, ModelStructure::subset({2, 0}));
    CHECK(S.cols() == 2);
    CHECK(S.col(0).isApprox(d.X().col(0)));
    CHECK(S.col(1).isApprox(d.X().col(2)));
    CHECK_THROWS_AS(submatrix(d, ModelStructure::subset({5})), InputError);
}

TEST_CASE("CodelengthBreakdown total sums the parts")
{
    CodelengthBreakdown b{1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(b.total() == doctest::Approx(15.0));
}
