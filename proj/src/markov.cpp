#include "wmc/markov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wmc::markov {

std::string_view to_string(EstimationMode mode) noexcept {
    return mode == EstimationMode::direct ? "direct" : "matrix-power";
}

std::string_view to_string(StationaryMethod method) noexcept {
    return method == StationaryMethod::power_iteration ? "power-iteration" : "linear-solve";
}

namespace {

LagMatrix normalize_counts(int lag, const CountMatrix& counts, double alpha) {
    const auto d = counts.rows();
    LagMatrix m;
    m.lag = lag;
    m.counts = counts;
    m.available = counts.sum() > 0;
    m.probabilities = Matrix::Zero(d, d);
    m.row_support.assign(static_cast<std::size_t>(d), false);
    for (Eigen::Index i = 0; i < d; ++i) {
        const auto row_total = static_cast<double>(counts.row(i).sum());
        if (alpha > 0.0) {
            const double denom = row_total + alpha * static_cast<double>(d);
            for (Eigen::Index j = 0; j < d; ++j)
                m.probabilities(i, j) = (static_cast<double>(counts(i, j)) + alpha) / denom;
            m.row_support[static_cast<std::size_t>(i)] = true;
        } else if (row_total > 0.0) {
            for (Eigen::Index j = 0; j < d; ++j)
                m.probabilities(i, j) = static_cast<double>(counts(i, j)) / row_total;
            m.row_support[static_cast<std::size_t>(i)] = true;
        }
    }
    return m;
}

/// Row-normalizes `p`; rows without mass become unsupported zero rows.
LagMatrix from_probabilities(int lag, const Matrix& p, CountMatrix counts) {
    const auto d = p.rows();
    LagMatrix m;
    m.lag = lag;
    m.counts = std::move(counts);
    m.probabilities = Matrix::Zero(d, d);
    m.row_support.assign(static_cast<std::size_t>(d), false);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double total = p.row(i).sum();
        if (total > 0.0) {
            m.probabilities.row(i) = p.row(i) / total;
            m.row_support[static_cast<std::size_t>(i)] = true;
            m.available = true;
        }
    }
    return m;
}

double inf_norm(const Eigen::RowVectorXd& v) { return v.cwiseAbs().maxCoeff(); }

/// Number of closed communicating classes of the directed graph with an
/// edge i -> j whenever q(i, j) > 0.
std::size_t closed_class_count(const Matrix& q) {
    const auto n = static_cast<std::size_t>(q.rows());
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> stack{s};
        reach[s][s] = true;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                if (q(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0.0 && !reach[s][v]) {
                    reach[s][v] = true;
                    stack.push_back(v);
                }
            }
        }
    }
    // A state is in a closed class iff everything it reaches reaches it back.
    std::vector<bool> seen(n, false);
    std::size_t closed = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        bool is_closed = true;
        for (std::size_t v = 0; v < n; ++v)
            if (reach[s][v] && !reach[v][s]) is_closed = false;
        for (std::size_t v = 0; v < n; ++v)
            if (reach[s][v] && reach[v][s]) seen[v] = true;
        if (is_closed) ++closed;
    }
    return closed;
}

} // namespace

TransitionMatrixSet::TransitionMatrixSet(std::size_t class_count, std::vector<LagMatrix> lags,
                                         std::vector<double> class_frequencies)
    : class_count_(class_count), lags_(std::move(lags)), class_frequencies_(std::move(class_frequencies)) {
    if (lags_.empty()) throw Error(ErrorKind::invalid_input, "a transition matrix set needs at least one lag");
    if (class_frequencies_.size() != class_count_)
        throw Error(ErrorKind::invalid_input, "class frequency vector has the wrong length");
    for (std::size_t t = 0; t < lags_.size(); ++t) {
        const auto& m = lags_[t];
        if (m.lag != static_cast<int>(t) + 1)
            throw Error(ErrorKind::invalid_input, "lag matrices must be ordered 1..m");
        if (static_cast<std::size_t>(m.probabilities.rows()) != class_count_ ||
            static_cast<std::size_t>(m.probabilities.cols()) != class_count_ ||
            m.row_support.size() != class_count_)
            throw Error(ErrorKind::invalid_input, "lag matrix has the wrong dimension");
    }
}

TransitionMatrixSet TransitionMatrixSet::from_powers(const Matrix& one_step, int max_lag) {
    if (max_lag < 1) throw Error(ErrorKind::invalid_input, "max_lag must be at least 1");
    if (one_step.rows() != one_step.cols() || one_step.rows() < 1)
        throw Error(ErrorKind::invalid_input, "transition matrix must be square");
    const auto d = one_step.rows();
    std::vector<LagMatrix> lags;
    Matrix power = one_step;
    for (int t = 1; t <= max_lag; ++t) {
        lags.push_back(from_probabilities(t, power, CountMatrix::Zero(d, d)));
        power = power * one_step;
    }
    const auto n = static_cast<std::size_t>(d);
    return TransitionMatrixSet(n, std::move(lags), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

const LagMatrix& TransitionMatrixSet::at_lag(int lag) const {
    if (lag < 1 || lag > max_lag())
        throw Error(ErrorKind::invalid_input, "lag " + std::to_string(lag) + " outside 1.." + std::to_string(max_lag()));
    return lags_[static_cast<std::size_t>(lag - 1)];
}

int TransitionMatrixSet::available_lag_count() const noexcept {
    return static_cast<int>(std::count_if(lags_.begin(), lags_.end(), [](const LagMatrix& m) { return m.available; }));
}

CountMatrix count_pairs(const ClassSequence& seq, int lag) {
    if (lag < 1) throw Error(ErrorKind::invalid_input, "lag must be at least 1");
    const auto d = static_cast<Eigen::Index>(seq.class_count());
    CountMatrix counts = CountMatrix::Zero(d, d);
    const auto step = static_cast<std::size_t>(lag);
    for (const Run& run : seq.runs()) {
        for (std::size_t k = run.begin; k + step < run.end; ++k) {
            const auto from = static_cast<Eigen::Index>(seq[k]->index());
            const auto to = static_cast<Eigen::Index>(seq[k + step]->index());
            ++counts(from, to);
        }
    }
    return counts;
}

TransitionMatrixSet estimate_transitions(const ClassSequence& seq, int max_lag, const TransitionOptions& options) {
    if (max_lag < 1) throw Error(ErrorKind::invalid_input, "max_lag must be at least 1");
    if (!(options.smoothing_alpha >= 0.0) || !std::isfinite(options.smoothing_alpha))
        throw Error(ErrorKind::invalid_input, "smoothing alpha must be a finite non-negative number");

    std::vector<LagMatrix> lags;
    lags.reserve(static_cast<std::size_t>(max_lag));
    for (int t = 1; t <= max_lag; ++t) {
        LagMatrix m = normalize_counts(t, count_pairs(seq, t), options.smoothing_alpha);
        // Smoothing makes every row a distribution but a lag with no pairs stays unavailable.
        if (!m.available) {
            m.probabilities.setZero();
            std::fill(m.row_support.begin(), m.row_support.end(), false);
        }
        lags.push_back(std::move(m));
    }
    if (std::none_of(lags.begin(), lags.end(), [](const LagMatrix& m) { return m.available; }))
        throw Error(ErrorKind::insufficient_data,
                    "sequence too short: no contiguous run spans even one lag-1 pair");

    if (options.mode == EstimationMode::matrix_power && lags.front().available) {
        const Matrix one_step = lags.front().probabilities;
        Matrix power = one_step;
        for (std::size_t t = 1; t < lags.size(); ++t) {
            power = power * one_step;
            lags[t] = from_probabilities(static_cast<int>(t) + 1, power, std::move(lags[t].counts));
        }
    }

    const auto counts = seq.class_counts();
    const double total = static_cast<double>(seq.valid_count());
    std::vector<double> freq(seq.class_count(), 0.0);
    for (std::size_t i = 0; i < freq.size(); ++i) freq[i] = static_cast<double>(counts[i]) / total;
    return TransitionMatrixSet(seq.class_count(), std::move(lags), std::move(freq));
}

StationaryDistribution stationary(const Matrix& one_step, const StationaryOptions& options) {
    if (one_step.rows() != one_step.cols() || one_step.rows() < 1)
        throw Error(ErrorKind::invalid_input, "transition matrix must be square and non-empty");
    if (!one_step.allFinite() || (one_step.array() < 0.0).any())
        throw Error(ErrorKind::invalid_input, "transition matrix entries must be finite and non-negative");
    const auto d = one_step.rows();

    // Drop states with no outgoing mass, repeatedly, since removing one can
    // empty the rows of states that only lead to it.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < d; ++i) keep.push_back(i);
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<Eigen::Index> next;
        for (auto i : keep) {
            double mass = 0.0;
            for (auto j : keep) mass += one_step(i, j);
            if (mass > 0.0)
                next.push_back(i);
            else
                changed = true;
        }
        keep.swap(next);
    }
    if (keep.empty()) throw Error(ErrorKind::no_unique_stationary, "transition matrix has no supported rows");

    const auto n = static_cast<Eigen::Index>(keep.size());
    Matrix q(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) q(a, b) = one_step(keep[a], keep[b]);
        q.row(a) /= q.row(a).sum();
    }

    if (closed_class_count(q) != 1)
        throw Error(ErrorKind::no_unique_stationary,
                    "chain has more than one closed class; the stationary distribution is not unique");

    Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
    if (options.start.size() == static_cast<std::size_t>(d)) {
        Eigen::RowVectorXd s(n);
        for (Eigen::Index a = 0; a < n; ++a) s(a) = std::max(0.0, options.start[static_cast<std::size_t>(keep[a])]);
        if (s.sum() > 0.0) pi = s / s.sum();
    }

    StationaryDistribution result;
    bool converged = false;
    for (long it = 1; it <= options.max_iterations; ++it) {
        Eigen::RowVectorXd next = pi * q;
        next /= next.sum();
        const double delta = inf_norm(next - pi);
        pi = next;
        if (delta < options.tolerance) {
            result.iterations = it;
            converged = true;
            break;
        }
    }
    double residual = inf_norm(pi * q - pi);
    result.method = StationaryMethod::power_iteration;

    if (!converged || !(residual < options.residual_tolerance)) {
        Matrix a(n + 1, n);
        a.topRows(n) = q.transpose() - Matrix::Identity(n, n);
        a.row(n).setOnes();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
        b(n) = 1.0;
        Eigen::ColPivHouseholderQR<Matrix> qr(a);
        if (qr.rank() < n)
            throw Error(ErrorKind::no_unique_stationary, "stationary equations are singular");
        Eigen::VectorXd x = qr.solve(b);
        x = x.cwiseMax(0.0);
        if (!(x.sum() > 0.0)) throw Error(ErrorKind::no_unique_stationary, "linear solve produced no distribution");
        pi = x.transpose() / x.sum();
        residual = inf_norm(pi * q - pi);
        result.method = StationaryMethod::linear_solve;
        result.iterations = 0;
        if (!(residual < options.residual_tolerance))
            throw Error(ErrorKind::no_unique_stationary,
                        "stationary distribution did not converge (residual " + std::to_string(residual) + ")");
    }

    result.probabilities.assign(static_cast<std::size_t>(d), 0.0);
    for (Eigen::Index a = 0; a < n; ++a) result.probabilities[static_cast<std::size_t>(keep[a])] = pi(a);
    result.residual = residual;
    return result;
}

StationaryDistribution stationary(const TransitionMatrixSet& set, StationaryOptions options) {
    const LagMatrix& first = set.at_lag(1);
    if (!first.available) throw Error(ErrorKind::insufficient_data, "lag-1 transition matrix is unavailable");
    if (options.start.empty()) options.start = set.class_frequencies();
    return stationary(first.probabilities, options);
}

int steady_state_lag(const TransitionMatrixSet& set, double tolerance) {
    if (set.available_lag_count() < 2)
        throw Error(ErrorKind::insufficient_data, "steady-state lag selection needs at least 2 available lags");
    const StationaryDistribution pi = stationary(set);
    Eigen::RowVectorXd target(static_cast<Eigen::Index>(pi.probabilities.size()));
    for (std::size_t i = 0; i < pi.probabilities.size(); ++i) target(static_cast<Eigen::Index>(i)) = pi.probabilities[i];

    for (const LagMatrix& m : set.lags()) {
        if (!m.available) continue;
        double worst = 0.0;
        for (std::size_t i = 0; i < set.class_count(); ++i)
            if (m.row_support[i]) worst = std::max(worst, inf_norm(m.row(i) - target));
        if (worst < tolerance) return m.lag;
    }
    return set.max_lag();
}

} // namespace wmc::markov
