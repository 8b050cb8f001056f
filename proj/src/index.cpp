#include "wmc/index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace wmc::index {

namespace {

constexpr double half_log_two_pi = 0.91893853320467274178;

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double standard_normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

bool parameters_valid(const FittedModel& m) {
    if (m.parameters.size() != 2) return false;
    for (double p : m.parameters)
        if (!std::isfinite(p)) return false;
    switch (m.family) {
    case Family::normal: return m.parameters[1] > 0.0;
    case Family::gamma: return m.parameters[0] > 0.0 && m.parameters[1] > 0.0;
    case Family::lognormal: return m.parameters[1] > 0.0;
    }
    return false;
}

std::optional<std::array<double, 2>> fit_normal(std::span<const double> x, EstimationMethod method,
                                                const SampleLMoments& lm) {
    if (method == EstimationMethod::l_moments) return std::array{lm.l1, lm.l2 * std::sqrt(std::numbers::pi)};
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::array{mean, std::sqrt(ss / n)};
}

// Hosking's rational approximation for the gamma shape from the L-CV.
double gamma_shape_from_lcv(double t) {
    if (t < 0.5) {
        const double z = std::numbers::pi * t * t;
        return (1.0 - 0.3080 * z) / (z - 0.05812 * z * z + 0.01765 * z * z * z);
    }
    const double z = 1.0 - t;
    return (0.7213 * z - 0.5947 * z * z) / (1.0 - 2.1817 * z + 1.2113 * z * z);
}

std::optional<std::array<double, 2>> fit_gamma(std::span<const double> x, EstimationMethod method,
                                               const SampleLMoments& lm) {
    if (method == EstimationMethod::l_moments) {
        const double t = lm.l2 / lm.l1;
        if (!(t > 0.0 && t < 1.0)) return std::nullopt;
        const double shape = gamma_shape_from_lcv(t);
        return std::array{shape, lm.l1 / shape};
    }
    const double n = static_cast<double>(x.size());
    double sum = 0.0;
    double sum_log = 0.0;
    for (double v : x) {
        sum += v;
        sum_log += std::log(v);
    }
    const double mean = sum / n;
    const double s = std::log(mean) - sum_log / n;
    if (!(s > 0.0)) return std::nullopt;
    // Newton on log(k) - digamma(k) = s, from the Minka starting point.
    double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    for (int iter = 0; iter < 100; ++iter) {
        const double f = std::log(k) - boost::math::digamma(k) - s;
        const double df = 1.0 / k - boost::math::trigamma(k);
        double next = k - f / df;
        if (!(next > 0.0)) next = k / 2.0;
        if (std::abs(next - k) <= 1e-12 * k) {
            k = next;
            return std::array{k, mean / k};
        }
        k = next;
    }
    return std::nullopt;
}

std::optional<std::array<double, 2>> fit_lognormal(std::span<const double> x, EstimationMethod method,
                                                   const SampleLMoments& lm) {
    if (method == EstimationMethod::l_moments) {
        // l2 / l1 = erf(sigma / 2) for the two-parameter log-normal.
        const double t = lm.l2 / lm.l1;
        if (!(t > 0.0 && t < 1.0)) return std::nullopt;
        const double sigma = 2.0 * boost::math::erf_inv(t);
        return std::array{std::log(lm.l1) - 0.5 * sigma * sigma, sigma};
    }
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += std::log(v);
    mean /= n;
    double ss = 0.0;
    for (double v : x) ss += (std::log(v) - mean) * (std::log(v) - mean);
    return std::array{mean, std::sqrt(ss / n)};
}

double ks_statistic(const FittedModel& model, std::vector<double> sorted) {
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = model.cdf(sorted[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

int family_order(Family f) { return static_cast<int>(f); }

} // namespace

RawSeries::RawSeries(std::string station_id, YearMonth start, std::vector<std::optional<double>> values)
    : MonthlySeries<double>(std::move(station_id), start, std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] && !std::isfinite(*values_[i]))
            throw Error(ErrorKind::invalid_input, "non-finite raw value at " + period(i).to_string());
}

std::string_view to_string(Family family) noexcept {
    switch (family) {
    case Family::normal: return "normal";
    case Family::gamma: return "gamma";
    case Family::lognormal: return "lognormal";
    }
    return "unknown";
}

std::string_view to_string(EstimationMethod method) noexcept {
    return method == EstimationMethod::l_moments ? "l-moments" : "mle";
}

std::string_view to_string(Grouping grouping) noexcept {
    return grouping == Grouping::pooled ? "pooled" : "per-calendar-month";
}

double FittedModel::cdf(double x) const {
    const double a = parameters[0];
    const double b = parameters[1];
    const double y = x - shift;
    switch (family) {
    case Family::normal: return standard_normal_cdf((y - a) / b);
    case Family::gamma: return y <= 0.0 ? 0.0 : boost::math::gamma_p(a, y / b);
    case Family::lognormal: return y <= 0.0 ? 0.0 : standard_normal_cdf((std::log(y) - a) / b);
    }
    return 0.0;
}

double FittedModel::quantile(double p) const {
    const double a = parameters[0];
    const double b = parameters[1];
    switch (family) {
    case Family::normal: return shift + a + b * standard_normal_quantile(p);
    case Family::gamma: return shift + b * boost::math::gamma_p_inv(a, p);
    case Family::lognormal: return shift + std::exp(a + b * standard_normal_quantile(p));
    }
    return 0.0;
}

double FittedModel::log_pdf(double x) const {
    const double a = parameters[0];
    const double b = parameters[1];
    const double y = x - shift;
    switch (family) {
    case Family::normal: {
        const double z = (y - a) / b;
        return -std::log(b) - half_log_two_pi - 0.5 * z * z;
    }
    case Family::gamma:
        if (y <= 0.0) return -INFINITY;
        return (a - 1.0) * std::log(y) - y / b - std::lgamma(a) - a * std::log(b);
    case Family::lognormal: {
        if (y <= 0.0) return -INFINITY;
        const double z = (std::log(y) - a) / b;
        return -std::log(y) - std::log(b) - half_log_two_pi - 0.5 * z * z;
    }
    }
    return -INFINITY;
}

SampleLMoments sample_l_moments(std::span<const double> samples) {
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double b0 = 0.0;
    double b1 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        b0 += x[i];
        b1 += static_cast<double>(i) / (n - 1.0) * x[i];
    }
    b0 /= n;
    b1 /= n;
    return SampleLMoments{b0, 2.0 * b1 - b0};
}

std::vector<FittedModel> fit_candidates(std::span<const double> samples, const FitOptions& options) {
    if (samples.size() < std::max<std::size_t>(options.min_samples, 2))
        throw Error(ErrorKind::insufficient_data,
                    "too few samples to fit: " + std::to_string(samples.size()) + " < " +
                        std::to_string(options.min_samples));
    for (double v : samples)
        if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "non-finite sample");
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo == *hi) throw Error(ErrorKind::degenerate_sample, "samples have zero variance");

    const std::vector<double> raw(samples.begin(), samples.end());
    std::vector<double> positive;
    double shift = 0.0;
    if (*lo > 0.0) {
        positive = raw;
    } else if (options.shift_non_positive) {
        shift = *lo - 1e-9;
        positive.reserve(raw.size());
        for (double v : raw) positive.push_back(v - shift);
    }
    const SampleLMoments lm_raw = sample_l_moments(raw);
    const SampleLMoments lm_pos = positive.empty() ? SampleLMoments{} : sample_l_moments(positive);

    std::vector<FittedModel> fits;
    for (Family family : {Family::normal, Family::gamma, Family::lognormal}) {
        const bool positive_support = family != Family::normal;
        if (positive_support && positive.empty()) continue;
        const std::vector<double>& data = positive_support ? positive : raw;
        for (EstimationMethod method : options.methods) {
            std::optional<std::array<double, 2>> params;
            switch (family) {
            case Family::normal: params = fit_normal(data, method, lm_raw); break;
            case Family::gamma: params = fit_gamma(data, method, lm_pos); break;
            case Family::lognormal: params = fit_lognormal(data, method, lm_pos); break;
            }
            if (!params) continue;
            FittedModel m;
            m.family = family;
            m.method = method;
            m.parameters = {(*params)[0], (*params)[1]};
            m.shift = positive_support ? shift : 0.0;
            m.sample_size = raw.size();
            if (!parameters_valid(m)) continue;
            double ll = 0.0;
            for (double v : raw) ll += m.log_pdf(v);
            if (!std::isfinite(ll)) continue;
            m.log_likelihood = ll;
            m.aic = 2.0 * 2.0 - 2.0 * ll;
            m.ks_statistic = ks_statistic(m, raw);
            fits.push_back(std::move(m));
        }
    }
    return fits;
}

FittedModel select_model(std::span<const FittedModel> fits) {
    if (fits.empty()) throw Error(ErrorKind::no_viable_model, "no candidate distribution could be fitted");
    const auto better = [](const FittedModel& a, const FittedModel& b) {
        if (a.aic != b.aic) return a.aic < b.aic;
        if (a.ks_statistic != b.ks_statistic) return a.ks_statistic < b.ks_statistic;
        return family_order(a.family) < family_order(b.family);
    };
    return *std::min_element(fits.begin(), fits.end(), better);
}

double to_index(const FittedModel& model, double x) {
    const double p = std::clamp(model.cdf(x), cdf_clamp, 1.0 - cdf_clamp);
    return standard_normal_quantile(p);
}

StandardizeResult standardize(const RawSeries& series, Grouping grouping, const FitOptions& options) {
    const std::size_t group_count = grouping == Grouping::pooled ? 1 : 12;
    auto group_of = [&](std::size_t i) -> std::size_t {
        return grouping == Grouping::pooled ? 0 : static_cast<std::size_t>(series.period(i).month - 1);
    };

    std::vector<std::vector<double>> groups(group_count);
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series[i]) groups[group_of(i)].push_back(*series[i]);

    std::string too_small;
    for (std::size_t g = 0; g < group_count; ++g) {
        if (groups[g].size() < options.min_samples) {
            if (!too_small.empty()) too_small += ", ";
            too_small += (grouping == Grouping::pooled ? std::string("pooled") : "month " + std::to_string(g + 1)) +
                         " (" + std::to_string(groups[g].size()) + " samples)";
        }
    }
    if (!too_small.empty())
        throw Error(ErrorKind::insufficient_data,
                    "groups below the minimum of " + std::to_string(options.min_samples) +
                        " samples: " + too_small);

    std::vector<FittedModel> models;
    models.reserve(group_count);
    for (std::size_t g = 0; g < group_count; ++g) {
        std::vector<FittedModel> fits;
        try {
            fits = fit_candidates(groups[g], options);
        } catch (const Error& e) {
            const std::string where = grouping == Grouping::pooled ? "pooled group" : "month " + std::to_string(g + 1);
            throw Error(e.kind(), where + ": " + e.what());
        }
        FittedModel best = select_model(fits);
        if (grouping == Grouping::per_calendar_month) best.calendar_month = static_cast<int>(g + 1);
        models.push_back(std::move(best));
    }

    std::vector<std::optional<double>> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series[i]) out[i] = to_index(models[group_of(i)], *series[i]);
    return StandardizeResult{IndexSeries(series.station_id(), series.start(), std::move(out)), std::move(models)};
}

} // namespace wmc::index
