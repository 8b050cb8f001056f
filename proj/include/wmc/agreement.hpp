#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wmc/domain.hpp"

namespace wmc::agreement {

/// Joint proportions of paired ordinal ratings. Rows index the earlier
/// member of each pair, columns the later one.
class ContingencyTable {
public:
    /// From raw pair counts; throws Error(empty_table) when all counts are zero.
    static ContingencyTable from_counts(const Eigen::MatrixXd& counts);
    /// From proportions that must be non-negative and sum to 1 within 1e-9.
    static ContingencyTable from_proportions(const Eigen::MatrixXd& cells, std::size_t pair_count);

    std::size_t class_count() const noexcept { return static_cast<std::size_t>(cells_.rows()); }
    const Eigen::MatrixXd& cells() const noexcept { return cells_; }
    const Eigen::VectorXd& row_marginals() const noexcept { return rows_; }
    const Eigen::VectorXd& col_marginals() const noexcept { return cols_; }
    std::size_t pair_count() const noexcept { return pair_count_; }

private:
    ContingencyTable(Eigen::MatrixXd cells, std::size_t pair_count);

    Eigen::MatrixXd cells_;
    Eigen::VectorXd rows_;
    Eigen::VectorXd cols_;
    std::size_t pair_count_ = 0;
};

/// Table of pairs (X_k-lag, X_k) taken within contiguous non-missing runs.
ContingencyTable lagged_table(const ClassSequence& seq, int lag);

struct KappaStatistics {
    std::optional<double> kappa;          // undefined when chance disagreement is zero
    std::optional<double> standard_error; // large-sample SE under the null of no agreement
    std::optional<double> z;
    std::optional<double> p_value;        // two-sided, normal approximation
};

/// Quadratic-weighted Cohen's kappa with disagreement weights (i - j)^2.
KappaStatistics weighted_kappa(const ContingencyTable& table);

/// Same statistic for an arbitrary non-negative disagreement weight matrix.
KappaStatistics weighted_kappa(const ContingencyTable& table, const Eigen::MatrixXd& disagreement_weights);

enum class WeightBasis { kappa, z };
std::string_view to_string(WeightBasis basis) noexcept;
WeightBasis parse_weight_basis(std::string_view text);

struct LagRecord {
    int lag = 1;
    bool available = false; // a lagged table existed
    std::size_t pair_count = 0;
    KappaStatistics statistics;
    double weight = 0.0;
};

/// Per-lag agreement and the normalized weights W_t = |b_t| / sum |b_u|.
struct LagWeightProfile {
    WeightBasis basis = WeightBasis::kappa;
    std::vector<LagRecord> lags;
    bool uniform_fallback = false; // no usable basis value; weights are uniform

    int max_lag() const noexcept { return static_cast<int>(lags.size()); }
    std::vector<double> weights() const;
    double weight(int lag) const { return lags.at(static_cast<std::size_t>(lag - 1)).weight; }
};

/**
 * Normalizes per-lag basis values into weights.
 *
 * Undefined values get weight 0 and are left out of the normalizer. When
 * no value is defined and non-zero, weights are uniform over `available`
 * lags (all lags when `available` is empty) and the fallback flag is set.
 */
std::vector<double> normalize_weights(std::span<const std::optional<double>> basis_values,
                                      const std::vector<bool>& available, bool& uniform_fallback);

/// Profile built directly from known per-lag kappas (kappa basis).
LagWeightProfile profile_from_kappas(std::span<const std::optional<double>> kappas);

LagWeightProfile weight_profile(const ClassSequence& seq, int max_lag, WeightBasis basis = WeightBasis::kappa);

} // namespace wmc::agreement
