#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wmc/domain.hpp"

namespace wmc::markov {

using Matrix = Eigen::MatrixXd;
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Empirical transition matrix for one lag.
struct LagMatrix {
    int lag = 1;
    bool available = false;   // false when no pair exists at this lag
    CountMatrix counts;       // counts(i, j): pairs (class i, class j) t steps apart
    Matrix probabilities;     // row-normalized counts; unsupported rows are zero
    std::vector<bool> row_support;

    std::int64_t total_pairs() const { return counts.sum(); }
    bool supported(std::size_t row) const { return available && row_support[row]; }
    Eigen::RowVectorXd row(std::size_t i) const { return probabilities.row(static_cast<Eigen::Index>(i)); }
};

enum class EstimationMode {
    direct,       // P(t) estimated from lag-t pairs
    matrix_power, // P(t) = P(1)^t
};

std::string_view to_string(EstimationMode mode) noexcept;

struct TransitionOptions {
    EstimationMode mode = EstimationMode::direct;
    /// Additive smoothing added to every cell before normalization (0 disables).
    double smoothing_alpha = 0.0;
};

/// The family {P(1) .. P(m)} plus the class frequencies it was estimated from.
class TransitionMatrixSet {
public:
    TransitionMatrixSet(std::size_t class_count, std::vector<LagMatrix> lags,
                        std::vector<double> class_frequencies);

    /// Builds P(t) = P^t for t = 1..max_lag from a stochastic matrix.
    static TransitionMatrixSet from_powers(const Matrix& one_step, int max_lag);

    std::size_t class_count() const noexcept { return class_count_; }
    int max_lag() const noexcept { return static_cast<int>(lags_.size()); }
    const std::vector<LagMatrix>& lags() const noexcept { return lags_; }
    const LagMatrix& at_lag(int lag) const;
    int available_lag_count() const noexcept;

    /// Relative class frequencies of the data (uniform when built from a matrix).
    const std::vector<double>& class_frequencies() const noexcept { return class_frequencies_; }

private:
    std::size_t class_count_;
    std::vector<LagMatrix> lags_;
    std::vector<double> class_frequencies_;
};

/// Counts of pairs (X_k, X_k+lag) lying inside one contiguous run.
CountMatrix count_pairs(const ClassSequence& seq, int lag);

TransitionMatrixSet estimate_transitions(const ClassSequence& seq, int max_lag,
                                         const TransitionOptions& options = {});

enum class StationaryMethod { power_iteration, linear_solve };
std::string_view to_string(StationaryMethod method) noexcept;

struct StationaryDistribution {
    std::vector<double> probabilities;
    double residual = 0.0; // ||pi P - pi||_inf
    StationaryMethod method = StationaryMethod::power_iteration;
    long iterations = 0;
};

struct StationaryOptions {
    double tolerance = 1e-10;
    long max_iterations = 100000;
    double residual_tolerance = 1e-8;
    /// Starting vector for power iteration; uniform over supported states when empty.
    std::vector<double> start;
};

/**
 * Stationary distribution of a one-step matrix.
 *
 * States whose rows are all zero (never departed from) are excluded and the
 * remaining rows are renormalized over the remaining states. Throws
 * Error(no_unique_stationary) when the support graph has more than one
 * closed class or neither method converges.
 */
StationaryDistribution stationary(const Matrix& one_step, const StationaryOptions& options = {});

/// Stationary distribution of P(1), started from the empirical class frequencies.
StationaryDistribution stationary(const TransitionMatrixSet& set, StationaryOptions options = {});

/// Smallest lag s whose supported rows are all within `tolerance` (inf-norm)
/// of the stationary distribution of P(1); max_lag when none qualifies.
int steady_state_lag(const TransitionMatrixSet& set, double tolerance = 0.01);

} // namespace wmc::markov
