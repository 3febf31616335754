#pragma once

/** @file
 * Candidate structure generation and criterion-driven model selection over
 * structures x degrees of freedom, with MML posterior summaries.
 */

#include "mmlreg/codelength.hpp"
#include "mmlreg/core.hpp"
#include "mmlreg/criteria.hpp"
#include "mmlreg/estimation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mmlreg
{

/// Largest q for which all-subsets enumeration is allowed.
inline constexpr std::size_t kMaxAllSubsetsQ = 25;

/// Nested: {}, {0}, {0,1}, ...; all subsets: bitmask order 0 .. 2^q - 1.
std::vector<ModelStructure> enumerate_structures(std::size_t q, SearchScheme scheme);

/**
 * Supports visited by the Gaussian lasso path (coordinate descent on
 * internally standardized columns) over @p n_lambda log-spaced penalties from
 * lambda_max down to 1e-3 lambda_max. Duplicates are dropped keeping the first
 * occurrence; the null model always comes first.
 */
std::vector<ModelStructure> lasso_path_structures(const Dataset& data, int n_lambda = 100);

struct CandidateScore
{
    ModelStructure structure;
    Dof nu = Dof::gaussian();
    /// Fit used for prediction: the MML fit for MML, the ML fit otherwise.
    FitResult fit;
    std::optional<CodelengthBreakdown> breakdown;
    double score = 0.0;
    Criterion criterion = Criterion::MML;
    /// Position in enumeration order (structure-major, then dof).
    std::size_t order = 0;
};

struct SelectionReport
{
    Criterion criterion = Criterion::MML;
    /// All successfully scored candidates, best first.
    std::vector<CandidateScore> ranked;
    std::vector<ModelStructure> structures;
    /// Minimum score over the dof grid for each structure (+inf if every fit failed).
    std::vector<double> structure_scores;
    std::vector<double> posteriors;
    std::vector<double> marginal_inclusion;
    std::size_t failures = 0;
    std::vector<std::string> warnings;

    const CandidateScore& best() const { return ranked.front(); }
};

struct SelectOptions
{
    EMConfig em;
    /// 0 means one worker per hardware thread.
    unsigned workers = 0;
};

/// Scores every (structure, nu) pair under @p criterion and ranks them.
SelectionReport select(const Dataset& data, const std::vector<ModelStructure>& structures,
                       const std::vector<Dof>& dof_grid, Criterion criterion,
                       const StructureCodingScheme& coding, const SelectOptions& options = {});

/// As select, for several criteria at once; each (structure, nu) is fitted once.
std::vector<SelectionReport> select_many(const Dataset& data,
                                         const std::vector<ModelStructure>& structures,
                                         const std::vector<Dof>& dof_grid,
                                         const std::vector<Criterion>& criteria,
                                         const StructureCodingScheme& coding,
                                         const SelectOptions& options = {});

/// Normalized exp(-codelength), computed relative to the minimum.
std::vector<double> model_posteriors(const std::vector<double>& codelengths);

/// Posterior mass of the structures containing each of the q predictors.
std::vector<double> marginal_inclusion(const std::vector<double>& posteriors,
                                       const std::vector<ModelStructure>& structures, std::size_t q);

/// The best candidate restricted to one degrees-of-freedom value, if any was scored.
const CandidateScore* best_at_dof(const SelectionReport& report, Dof nu);

} // namespace mmlreg
