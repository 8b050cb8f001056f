#include "wmc/simulate.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "wmc/error.hpp"

namespace wmc::simulate {

namespace {

std::size_t draw(const double* p, std::size_t d, double u) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        acc += p[k];
        if (u < acc) return k;
    }
    // rounding can leave u above the cumulative total; take the last positive state
    for (std::size_t k = d; k-- > 0;)
        if (p[k] > 0.0) return k;
    return d - 1;
}

std::string station_name(int i) {
    static const char* names[] = {"ALPHA", "BRAVO", "CHARLIE", "DELTA", "ECHO", "FOXTROT", "GOLF", "HOTEL"};
    if (i < 8) return std::string("SYN-") + names[i];
    return "SYN-" + std::to_string(i + 1);
}

} // namespace

ClassSequence markov_chain(const markov::Matrix& transition, std::size_t n, Rng& rng, std::size_t initial,
                           const std::string& station_id) {
    const auto d = static_cast<std::size_t>(transition.rows());
    if (d == 0 || transition.cols() != transition.rows()) throw Error(ErrorKind::invalid_input, "transition matrix must be square");
    if (initial >= d) throw Error(ErrorKind::invalid_input, "initial state out of range");
    const markov::Matrix rows = transition.transpose(); // column-major: row i of P is contiguous column i here
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::optional<DroughtClass>> out;
    out.reserve(n);
    std::size_t s = initial;
    for (std::size_t i = 0; i < n; ++i) {
        out.emplace_back(DroughtClass::from_index(s));
        s = draw(rows.col(static_cast<Eigen::Index>(s)).data(), d, unif(rng));
    }
    return ClassSequence(station_id, YearMonth{1900, 1}, std::move(out), d);
}

ClassSequence iid(const std::vector<double>& probabilities, std::size_t n, Rng& rng, const std::string& station_id) {
    if (probabilities.empty()) throw Error(ErrorKind::invalid_input, "need at least one class");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::optional<DroughtClass>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.emplace_back(DroughtClass::from_index(draw(probabilities.data(), probabilities.size(), unif(rng))));
    return ClassSequence(station_id, YearMonth{1900, 1}, std::move(out), probabilities.size());
}

std::vector<StationClimate> climate(const ClimateOptions& options, std::uint64_t seed) {
    if (options.stations < 1) throw Error(ErrorKind::invalid_input, "need at least one station");
    if (options.end < options.start) throw Error(ErrorKind::invalid_input, "end period precedes start period");
    if (!(options.missing_rate >= 0.0 && options.missing_rate < 1.0))
        throw Error(ErrorKind::invalid_input, "missing rate must be in [0, 1)");
    const auto n = static_cast<std::size_t>(options.end.ordinal() - options.start.ordinal() + 1);
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const boost::math::normal_distribution<double> std_normal(0.0, 1.0);

    std::vector<StationClimate> out;
    for (int s = 0; s < options.stations; ++s) {
        const double phi = 0.45 + 0.4 * unif(rng);        // latent persistence
        const double wet = 20.0 + 80.0 * unif(rng);       // annual mean monthly precipitation
        const double season = 0.3 + 0.5 * unif(rng);      // relative seasonal amplitude
        const double peak = 12.0 * unif(rng);             // month of the seasonal maximum
        const double shape = 1.2 + 2.0 * unif(rng);       // gamma shape
        const double t_mean = 8.0 + 14.0 * unif(rng);
        const double t_amp = 6.0 + 10.0 * unif(rng);

        std::vector<std::optional<double>> precip(n), temp(n);
        double z = gauss(rng);
        for (std::size_t i = 0; i < n; ++i) {
            z = phi * z + std::sqrt(1.0 - phi * phi) * gauss(rng);
            const YearMonth ym = options.start.plus_months(static_cast<int>(i));
            const double angle = 2.0 * std::numbers::pi * (ym.month - 1 - peak) / 12.0;
            const double mean = wet * (1.0 + season * std::cos(angle));
            const boost::math::gamma_distribution<double> g(shape, mean / shape);
            const double u = std::clamp(boost::math::cdf(std_normal, z), 1e-9, 1.0 - 1e-9);
            const double p = boost::math::quantile(g, u);
            const double t = t_mean + t_amp * std::cos(angle + std::numbers::pi) + 1.5 * gauss(rng) - 0.3 * z;
            const bool missing = unif(rng) < options.missing_rate;
            if (!missing) {
                precip[i] = std::round(p * 10.0) / 10.0;
                temp[i] = std::round(t * 10.0) / 10.0;
            }
        }
        const std::string id = station_name(s);
        out.push_back(StationClimate{index::RawSeries(id, options.start, std::move(precip)),
                                     index::RawSeries(id, options.start, std::move(temp))});
    }
    return out;
}

} // namespace wmc::simulate
