#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wmc/domain.hpp"

namespace wmc::index {

/// Raw monthly aggregate (precipitation or a user-supplied combination).
class RawSeries : public MonthlySeries<double> {
public:
    RawSeries() = default;
    RawSeries(std::string station_id, YearMonth start, std::vector<std::optional<double>> values);
};

enum class Family { normal, gamma, lognormal };
enum class EstimationMethod { l_moments, mle };
enum class Grouping { per_calendar_month, pooled };

std::string_view to_string(Family family) noexcept;
std::string_view to_string(EstimationMethod method) noexcept;
std::string_view to_string(Grouping grouping) noexcept;

/**
 * A fitted two-parameter candidate.
 *
 * Parameters by family:
 *   normal    (mean, sd)
 *   gamma     (shape, scale)
 *   lognormal (meanlog, sdlog)
 *
 * `shift` is subtracted from data before evaluating the family; it is zero
 * unless location shifting was enabled for non-positive samples.
 */
struct FittedModel {
    Family family = Family::normal;
    std::vector<double> parameters;
    EstimationMethod method = EstimationMethod::mle;
    double shift = 0.0;
    double log_likelihood = 0.0;
    double aic = 0.0;
    double ks_statistic = 0.0;
    std::size_t sample_size = 0;
    std::optional<int> calendar_month; // empty when pooled

    double cdf(double x) const;
    double quantile(double p) const;
    double log_pdf(double x) const;
};

struct FitOptions {
    std::size_t min_samples = 20;
    std::vector<EstimationMethod> methods{EstimationMethod::l_moments, EstimationMethod::mle};
    /// Shift positive-support families when samples are non-positive instead of skipping them.
    bool shift_non_positive = false;
};

/// Sample L-moments l1, l2 (unbiased probability-weighted moment estimators).
struct SampleLMoments {
    double l1 = 0.0;
    double l2 = 0.0;
};
SampleLMoments sample_l_moments(std::span<const double> samples);

/// Fits normal, gamma and log-normal by each requested method.
/// Families whose support excludes the data are skipped, not fatal.
std::vector<FittedModel> fit_candidates(std::span<const double> samples, const FitOptions& options = {});

/// Minimal AIC; ties by smaller KS statistic, then family order.
FittedModel select_model(std::span<const FittedModel> fits);

/// Clamping applied to F(x) before the normal quantile transform.
inline constexpr double cdf_clamp = 1e-6;

struct StandardizeResult {
    IndexSeries index;
    std::vector<FittedModel> models; // one per group, in group order
};

StandardizeResult standardize(const RawSeries& series, Grouping grouping = Grouping::per_calendar_month,
                              const FitOptions& options = {});

/// Phi^-1(clamp(F(x))) for one value under a fitted model.
double to_index(const FittedModel& model, double x);

} // namespace wmc::index
