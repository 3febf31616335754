#pragma once

/** @file
 * Shared domain types for Student-t regression: datasets, model structures,
 * fitted parameters and message-length breakdowns.
 */

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmlreg
{

/// Bad input: malformed files, unknown columns, invalid arguments.
class InputError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (singular design, perfect fit, quadrature).
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class SingularDesignError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

class PerfectFitError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

/**
 * Degrees of freedom of a Student-t distribution.
 *
 * The Gaussian limit is a distinct state, not a large number: every formula
 * branches on is_gaussian() and evaluates the limiting expression directly.
 */
class Dof
{
public:
    explicit Dof(double nu);

    static Dof gaussian() noexcept { return Dof{}; }

    bool is_gaussian() const noexcept { return std::isinf(nu_); }

    /// +infinity for the Gaussian limit.
    double value() const noexcept { return nu_; }

    friend bool operator==(const Dof&, const Dof&) = default;

private:
    Dof() noexcept : nu_{std::numeric_limits<double>::infinity()} {}
    double nu_;
};

std::string to_string(const Dof& nu);
/// Accepts a positive number or inf / infinity / gaussian.
Dof parse_dof(const std::string& text);

enum class SearchScheme
{
    Nested,
    AllSubsets,
};

std::string to_string(SearchScheme scheme);
SearchScheme parse_scheme(const std::string& name);

/// Predictor subset. Indices are zero-based, sorted and unique.
class ModelStructure
{
public:
    ModelStructure() = default;

    /// Any subset; indices are sorted, duplicates rejected.
    static ModelStructure subset(std::vector<std::size_t> indices);

    /// The nested structure {0, ..., p-1}.
    static ModelStructure nested(std::size_t p);

    const std::vector<std::size_t>& gamma() const noexcept { return gamma_; }
    std::size_t size() const noexcept { return gamma_.size(); }
    SearchScheme scheme() const noexcept { return scheme_; }
    bool contains(std::size_t j) const;

    friend bool operator==(const ModelStructure& a, const ModelStructure& b)
    {
        return a.gamma_ == b.gamma_;
    }

private:
    std::vector<std::size_t> gamma_;
    SearchScheme scheme_ = SearchScheme::AllSubsets;
};

/// Lexicographic order on the index sets.
bool lexicographic_less(const ModelStructure& a, const ModelStructure& b);

/// Response plus centered predictors. Immutable after construction.
class Dataset
{
public:
    /// Centers each column of @p X_raw; keeps the means for prediction on raw data.
    Dataset(Eigen::VectorXd y, const Eigen::MatrixXd& X_raw, std::vector<std::string> names,
            std::string target = "y");

    const Eigen::VectorXd& y() const noexcept { return y_; }
    const Eigen::MatrixXd& X() const noexcept { return X_; }
    const Eigen::VectorXd& column_means() const noexcept { return means_; }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& target() const noexcept { return target_; }

    std::size_t n() const noexcept { return static_cast<std::size_t>(y_.size()); }
    std::size_t q() const noexcept { return static_cast<std::size_t>(X_.cols()); }

    /// Index of a predictor by name; throws InputError when absent.
    std::size_t column_index(const std::string& name) const;

    /// Raw (uncentered) predictor matrix.
    Eigen::MatrixXd raw_X() const;

    /// Rows selected by @p rows, re-centered on their own means.
    Dataset subset_rows(const std::vector<std::size_t>& rows) const;

private:
    Eigen::VectorXd y_;
    Eigen::MatrixXd X_;
    Eigen::VectorXd means_;
    std::vector<std::string> names_;
    std::string target_;
};

/// Reads a header-first CSV; @p target becomes y and every other column a predictor.
Dataset load_dataset(const std::filesystem::path& path, const std::string& target);

/// Writes target plus (centered) predictors in the same CSV layout load_dataset reads.
void write_dataset(const std::filesystem::path& path, const Dataset& data);

/// Columns of the centered design selected by @p structure, in gamma order.
Eigen::MatrixXd submatrix(const Dataset& data, const ModelStructure& structure);

/// Parameters of one Student-t regression fit.
struct TParams
{
    double beta0 = 0.0;
    Eigen::VectorXd beta;
    double tau = 1.0;
    Dof nu = Dof::gaussian();

    /// Fitted locations on the centered design the parameters were estimated against.
    Eigen::VectorXd fitted(const Eigen::MatrixXd& Xs) const;
};

/// Message length split into its parts, in nits.
struct CodelengthBreakdown
{
    double assertion_beta = 0.0;  ///< I(beta | K)
    double assertion_scale = 0.0; ///< I(beta0, tau)
    double detail = 0.0;          ///< I(y | theta), including the (p+2)/2 rounding term
    double hyper_k = 0.0;         ///< I(K)
    double structure = 0.0;       ///< I(gamma)

    double total() const noexcept
    {
        return assertion_beta + assertion_scale + detail + hyper_k + structure;
    }
};

} // namespace mmlreg
