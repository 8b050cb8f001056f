#include "wmc/agreement.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace wmc::agreement {

ContingencyTable::ContingencyTable(Eigen::MatrixXd cells, std::size_t pair_count)
    : cells_(std::move(cells)), rows_(cells_.rowwise().sum()), cols_(cells_.colwise().sum().transpose()),
      pair_count_(pair_count) {}

ContingencyTable ContingencyTable::from_counts(const Eigen::MatrixXd& counts) {
    if (counts.rows() != counts.cols() || counts.rows() < 1)
        throw Error(ErrorKind::invalid_input, "contingency table must be square");
    if (!counts.allFinite() || (counts.array() < 0.0).any())
        throw Error(ErrorKind::invalid_input, "contingency counts must be finite and non-negative");
    const double total = counts.sum();
    if (!(total > 0.0)) throw Error(ErrorKind::empty_table, "contingency table has no pairs");
    return ContingencyTable(counts / total, static_cast<std::size_t>(std::llround(total)));
}

ContingencyTable ContingencyTable::from_proportions(const Eigen::MatrixXd& cells, std::size_t pair_count) {
    if (cells.rows() != cells.cols() || cells.rows() < 1)
        throw Error(ErrorKind::invalid_input, "contingency table must be square");
    if (!cells.allFinite() || (cells.array() < 0.0).any())
        throw Error(ErrorKind::invalid_input, "proportions must be finite and non-negative");
    if (std::abs(cells.sum() - 1.0) > 1e-9)
        throw Error(ErrorKind::invalid_input, "proportions must sum to 1");
    if (pair_count == 0) throw Error(ErrorKind::empty_table, "contingency table has no pairs");
    return ContingencyTable(cells, pair_count);
}

ContingencyTable lagged_table(const ClassSequence& seq, int lag) {
    if (lag < 1) throw Error(ErrorKind::invalid_input, "lag must be at least 1");
    const auto d = static_cast<Eigen::Index>(seq.class_count());
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(d, d);
    const auto step = static_cast<std::size_t>(lag);
    for (const Run& run : seq.runs())
        for (std::size_t k = run.begin + step; k < run.end; ++k)
            counts(static_cast<Eigen::Index>(seq[k - step]->index()), static_cast<Eigen::Index>(seq[k]->index())) += 1.0;
    if (counts.sum() == 0.0)
        throw Error(ErrorKind::empty_table, "no pairs at lag " + std::to_string(lag) + " inside any contiguous run");
    return ContingencyTable::from_counts(counts);
}

KappaStatistics weighted_kappa(const ContingencyTable& table) {
    const auto d = static_cast<Eigen::Index>(table.class_count());
    Eigen::MatrixXd w(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) w(i, j) = static_cast<double>((i - j) * (i - j));
    return weighted_kappa(table, w);
}

KappaStatistics weighted_kappa(const ContingencyTable& table, const Eigen::MatrixXd& w) {
    const auto d = static_cast<Eigen::Index>(table.class_count());
    if (w.rows() != d || w.cols() != d)
        throw Error(ErrorKind::invalid_input, "weight matrix does not match the table");
    const Eigen::MatrixXd& p = table.cells();
    const Eigen::VectorXd& r = table.row_marginals();
    const Eigen::VectorXd& c = table.col_marginals();

    const double observed = w.cwiseProduct(p).sum();
    const Eigen::MatrixXd chance = r * c.transpose();
    const double expected = w.cwiseProduct(chance).sum();

    KappaStatistics out;
    if (!(expected > 0.0)) return out;
    const double kappa = 1.0 - observed / expected;
    out.kappa = kappa;

    // Null variance (Fleiss, Cohen & Everitt) written with disagreement
    // weights; it is invariant to rescaling w.
    const Eigen::VectorXd row_mean = w * c;             // sum_j c_j w_ij
    const Eigen::VectorXd col_mean = w.transpose() * r; // sum_i r_i w_ij
    double spread = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const double a = row_mean(i) + col_mean(j) - w(i, j);
            spread += chance(i, j) * a * a;
        }
    }
    const double n = static_cast<double>(table.pair_count());
    const double variance = (spread - expected * expected) / (n * expected * expected);
    if (variance > 0.0 && std::isfinite(variance)) {
        const double se = std::sqrt(variance);
        out.standard_error = se;
        out.z = kappa / se;
        out.p_value = std::erfc(std::abs(*out.z) / std::numbers::sqrt2);
    }
    return out;
}

std::string_view to_string(WeightBasis basis) noexcept { return basis == WeightBasis::kappa ? "kappa" : "z"; }

WeightBasis parse_weight_basis(std::string_view text) {
    if (text == "kappa") return WeightBasis::kappa;
    if (text == "z") return WeightBasis::z;
    throw Error(ErrorKind::invalid_input, "unknown weight basis '" + std::string(text) + "' (expected kappa or z)");
}

std::vector<double> LagWeightProfile::weights() const {
    std::vector<double> out;
    out.reserve(lags.size());
    for (const auto& r : lags) out.push_back(r.weight);
    return out;
}

std::vector<double> normalize_weights(std::span<const std::optional<double>> basis_values,
                                      const std::vector<bool>& available, bool& uniform_fallback) {
    const std::size_t m = basis_values.size();
    std::vector<double> weights(m, 0.0);
    double total = 0.0;
    for (const auto& b : basis_values)
        if (b) total += std::abs(*b);

    uniform_fallback = !(total > 0.0) || !std::isfinite(total);
    if (!uniform_fallback) {
        for (std::size_t t = 0; t < m; ++t)
            if (basis_values[t]) weights[t] = std::abs(*basis_values[t]) / total;
        return weights;
    }

    std::size_t usable = 0;
    for (std::size_t t = 0; t < m; ++t)
        if (available.empty() || available[t]) ++usable;
    const bool all = usable == 0 || available.empty();
    if (all) usable = m;
    for (std::size_t t = 0; t < m; ++t)
        if (all || available[t]) weights[t] = 1.0 / static_cast<double>(usable);
    return weights;
}

LagWeightProfile profile_from_kappas(std::span<const std::optional<double>> kappas) {
    if (kappas.empty()) throw Error(ErrorKind::invalid_input, "weight profile needs at least one lag");
    LagWeightProfile profile;
    profile.basis = WeightBasis::kappa;
    bool fallback = false;
    const auto weights = normalize_weights(kappas, {}, fallback);
    profile.uniform_fallback = fallback;
    for (std::size_t t = 0; t < kappas.size(); ++t) {
        LagRecord rec;
        rec.lag = static_cast<int>(t) + 1;
        rec.available = true;
        rec.statistics.kappa = kappas[t];
        rec.weight = weights[t];
        profile.lags.push_back(rec);
    }
    return profile;
}

LagWeightProfile weight_profile(const ClassSequence& seq, int max_lag, WeightBasis basis) {
    if (max_lag < 1) throw Error(ErrorKind::invalid_input, "max_lag must be at least 1");
    LagWeightProfile profile;
    profile.basis = basis;
    std::vector<std::optional<double>> values;
    std::vector<bool> available;
    for (int t = 1; t <= max_lag; ++t) {
        LagRecord rec;
        rec.lag = t;
        try {
            const ContingencyTable table = lagged_table(seq, t);
            rec.available = true;
            rec.pair_count = table.pair_count();
            rec.statistics = weighted_kappa(table);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::empty_table) throw;
        }
        values.push_back(basis == WeightBasis::kappa ? rec.statistics.kappa : rec.statistics.z);
        available.push_back(rec.available);
        profile.lags.push_back(rec);
    }
    bool fallback = false;
    const auto weights = normalize_weights(values, available, fallback);
    profile.uniform_fallback = fallback;
    for (std::size_t t = 0; t < weights.size(); ++t) profile.lags[t].weight = weights[t];
    return profile;
}

} // namespace wmc::agreement
