#include "mmlreg/core.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mmlreg
{

Dof::Dof(double nu) : nu_{nu}
{
    if (!(nu > 0.0))
        throw InputError("degrees of freedom must be positive, got " + std::to_string(nu));
}

std::string to_string(const Dof& nu)
{
    if (nu.is_gaussian())
        return "inf";
    std::ostringstream os;
    os << std::setprecision(6) << nu.value();
    return os.str();
}

Dof parse_dof(const std::string& text)
{
    if (text == "inf" || text == "infinity" || text == "gaussian")
        return Dof::gaussian();
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        throw InputError("invalid degrees of freedom '" + text + "'");
    if (std::isinf(v) && v > 0.0)
        return Dof::gaussian();
    return Dof(v);
}

std::string to_string(SearchScheme scheme)
{
    return scheme == SearchScheme::Nested ? "nested" : "subsets";
}

SearchScheme parse_scheme(const std::string& name)
{
    if (name == "nested")
        return SearchScheme::Nested;
    if (name == "subsets" || name == "all-subsets")
        return SearchScheme::AllSubsets;
    throw InputError("unknown search scheme '" + name + "' (expected nested|subsets)");
}

ModelStructure ModelStructure::subset(std::vector<std::size_t> indices)
{
    std::sort(indices.begin(), indices.end());
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
        throw InputError("model structure contains a duplicate predictor index");
    ModelStructure s;
    s.gamma_ = std::move(indices);
    s.scheme_ = SearchScheme::AllSubsets;
    return s;
}

ModelStructure ModelStructure::nested(std::size_t p)
{
    ModelStructure s;
    s.gamma_.resize(p);
    for (std::size_t j = 0; j < p; ++j)
        s.gamma_[j] = j;
    s.scheme_ = SearchScheme::Nested;
    return s;
}

bool ModelStructure::contains(std::size_t j) const
{
    return std::binary_search(gamma_.begin(), gamma_.end(), j);
}

bool lexicographic_less(const ModelStructure& a, const ModelStructure& b)
{
    return std::lexicographical_compare(a.gamma().begin(), a.gamma().end(), b.gamma().begin(),
                                        b.gamma().end());
}

Dataset::Dataset(Eigen::VectorXd y, const Eigen::MatrixXd& X_raw, std::vector<std::string> names,
                 std::string target)
    : y_{std::move(y)}, names_{std::move(names)}, target_{std::move(target)}
{
    if (X_raw.rows() != y_.size())
        throw InputError("predictor rows (" + std::to_string(X_raw.rows()) +
                         ") do not match response length (" + std::to_string(y_.size()) + ")");
    if (y_.size() < 3)
        throw InputError("dataset needs at least 3 rows, got " + std::to_string(y_.size()));
    if (static_cast<Eigen::Index>(names_.size()) != X_raw.cols())
        throw InputError("column name count does not match predictor count");
    if (!y_.allFinite() || !X_raw.allFinite())
        throw InputError("dataset contains non-finite values");

    means_ = X_raw.colwise().mean().transpose();
    X_ = X_raw.rowwise() - means_.transpose();
}

std::size_t Dataset::column_index(const std::string& name) const
{
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end())
        throw InputError("unknown predictor column '" + name + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

Eigen::MatrixXd Dataset::raw_X() const
{
    return X_.rowwise() + means_.transpose();
}

Dataset Dataset::subset_rows(const std::vector<std::size_t>& rows) const
{
    Eigen::VectorXd ys(static_cast<Eigen::Index>(rows.size()));
    Eigen::MatrixXd Xs(static_cast<Eigen::Index>(rows.size()), X_.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        const auto r = static_cast<Eigen::Index>(rows[i]);
        if (r >= y_.size())
            throw InputError("row index out of range");
        ys(static_cast<Eigen::Index>(i)) = y_(r);
        Xs.row(static_cast<Eigen::Index>(i)) = X_.row(r) + means_.transpose();
    }
    return Dataset(std::move(ys), Xs, names_, target_);
}

namespace
{

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ','))
        out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_cell(const std::string& cell, std::size_t line_no, const std::string& column)
{
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (cell.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value))
        throw InputError("line " + std::to_string(line_no) + ", column '" + column +
                         "': non-numeric or missing value '" + cell + "'");
    return value;
}

} // namespace

Dataset load_dataset(const std::filesystem::path& path, const std::string& target)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open dataset file '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line))
        throw InputError("dataset file '" + path.string() + "' is empty");
    const auto header = split_line(line);

    auto target_it = std::find(header.begin(), header.end(), target);
    if (target_it == header.end())
        throw InputError("target column '" + target + "' not found in '" + path.string() + "'");
    const auto target_col = static_cast<std::size_t>(target_it - header.begin());

    std::vector<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (j != target_col)
            names.push_back(header[j]);

    std::vector<double> ys;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw InputError("line " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(header.size()));
        std::vector<double> row;
        row.reserve(names.size());
        for (std::size_t j = 0; j < cells.size(); ++j)
        {
            const double v = parse_cell(cells[j], line_no, header[j]);
            if (j == target_col)
                ys.push_back(v);
            else
                row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (ys.size() < 3)
        throw InputError("dataset '" + path.string() + "' has " + std::to_string(ys.size()) +
                         " rows; at least 3 are required");

    const auto n = static_cast<Eigen::Index>(ys.size());
    const auto q = static_cast<Eigen::Index>(names.size());
    Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
    Eigen::MatrixXd X(n, q);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < q; ++j)
            X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return Dataset(std::move(y), X, std::move(names), target);
}

void write_dataset(const std::filesystem::path& path, const Dataset& data)
{
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write dataset file '" + path.string() + "'");
    out << data.target();
    for (const auto& name : data.names())
        out << ',' << name;
    out << '\n' << std::setprecision(17);
    for (Eigen::Index i = 0; i < data.y().size(); ++i)
    {
        out << data.y()(i);
        for (Eigen::Index j = 0; j < data.X().cols(); ++j)
            out << ',' << data.X()(i, j);
        out << '\n';
    }
}

Eigen::MatrixXd submatrix(const Dataset& data, const ModelStructure& structure)
{
    const auto& gamma = structure.gamma();
    Eigen::MatrixXd Xs(data.X().rows(), static_cast<Eigen::Index>(gamma.size()));
    for (std::size_t k = 0; k < gamma.size(); ++k)
    {
        if (gamma[k] >= data.q())
            throw InputError("predictor index " + std::to_string(gamma[k]) +
                             " out of range for q=" + std::to_string(data.q()));
        Xs.col(static_cast<Eigen::Index>(k)) = data.X().col(static_cast<Eigen::Index>(gamma[k]));
    }
    return Xs;
}

Eigen::VectorXd TParams::fitted(const Eigen::MatrixXd& Xs) const
{
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(Xs.rows(), beta0);
    if (beta.size() > 0)
        mu.noalias() += Xs * beta;
    return mu;
}

} // namespace mmlreg
