#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace uavbeam {

// ---------------------------------------------------------------------------
// Feature sets and distances
// ---------------------------------------------------------------------------

/// K x M array of observed physical characteristics; characteristic m of row
/// k is a small real vector (m=0: position, m=1: velocity by convention).
class FeatureSet {
public:
    FeatureSet() = default;
    FeatureSet(int k, int m) : k_(k), m_(m), data_(static_cast<std::size_t>(k) * m) {}

    int count() const { return k_; }
    int characteristics() const { return m_; }

    Eigen::VectorXd& at(int k, int m) { return data_[index(k, m)]; }
    const Eigen::VectorXd& at(int k, int m) const { return data_[index(k, m)]; }

    /// All rows must agree on per-characteristic dimensionality.
    void validate() const {
        for (int m = 0; m < m_; ++m) {
            const auto dim = at(0, m).size();
            for (int k = 1; k < k_; ++k)
                if (at(k, m).size() != dim)
                    throw std::invalid_argument("FeatureSet: inconsistent characteristic dimension");
        }
    }

private:
    std::size_t index(int k, int m) const {
        return static_cast<std::size_t>(k) * m_ + m;
    }
    int k_ = 0;
    int m_ = 0;
    std::vector<Eigen::VectorXd> data_;
};

enum class DistanceMetric { euclidean, mahalanobis, emd };

/// Cholesky-backed Mahalanobis distance; rejects non-PD covariance.
class MahalanobisWhitener {
public:
    explicit MahalanobisWhitener(const Eigen::MatrixXd& sigma) : llt_(sigma) {
        if (llt_.info() != Eigen::Success)
            throw std::invalid_argument("MahalanobisWhitener: covariance not positive definite");
    }
    double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
        return llt_.matrixL().solve(a - b).norm();
    }

private:
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// 1-D transport distance between the component empirical distributions:
/// sort both component lists, mean absolute difference.
inline double emd_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    std::vector<double> sa(a.data(), a.data() + a.size());
    std::vector<double> sb(b.data(), b.data() + b.size());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) acc += std::abs(sa[i] - sb[i]);
    return acc / static_cast<double>(sa.size());
}

/// Distance between two characteristic vectors under the selected metric.
/// sigma is required (and must be positive definite) for Mahalanobis.
inline double characteristic_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                      DistanceMetric metric,
                                      const Eigen::MatrixXd* sigma = nullptr) {
    if (a.size() != b.size())
        throw std::invalid_argument("characteristic_distance: dimension mismatch");
    switch (metric) {
        case DistanceMetric::euclidean:
            return (a - b).norm();
        case DistanceMetric::mahalanobis: {
            if (sigma == nullptr)
                throw std::invalid_argument("characteristic_distance: Mahalanobis needs a covariance");
            return MahalanobisWhitener(*sigma).distance(a, b);
        }
        case DistanceMetric::emd:
            return emd_distance(a, b);
    }
    throw std::logic_error("characteristic_distance: unknown metric");
}

/// Per-characteristic distance dispatcher holding prefactored whiteners for
/// the Mahalanobis case.
class MetricEvaluator {
public:
    explicit MetricEvaluator(DistanceMetric metric, std::vector<Eigen::MatrixXd> sigmas = {})
        : metric_(metric) {
        if (metric == DistanceMetric::mahalanobis) {
            whiteners_.reserve(sigmas.size());
            for (const auto& s : sigmas) whiteners_.emplace_back(s);
        }
    }

    DistanceMetric metric() const { return metric_; }

    double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int m) const {
        switch (metric_) {
            case DistanceMetric::euclidean:
                return (a - b).norm();
            case DistanceMetric::mahalanobis:
                return whiteners_.at(static_cast<std::size_t>(m)).distance(a, b);
            case DistanceMetric::emd:
                return emd_distance(a, b);
        }
        throw std::logic_error("MetricEvaluator: unknown metric");
    }

private:
    DistanceMetric metric_;
    std::vector<MahalanobisWhitener> whiteners_;
};

// ---------------------------------------------------------------------------
// Sameness, distinguishability, weights, cost
// ---------------------------------------------------------------------------

inline constexpr double kSamenessFloor = 1e-6;

/// Map an unbounded distance into a probability-like similarity in (0, 1].
inline double sameness_score(double distance) {
    if (distance < 0.0) throw std::invalid_argument("sameness_score: negative distance");
    return std::max(1.0 / (1.0 + distance), kSamenessFloor);
}

enum class DistinguishabilityMode {
    textual,      ///< P = prod_{j!=k} (1 - c_kj)
    eq16_literal, ///< P = sum_{j!=k} c_kj prod_{q!=j,k} (1 - c_kq)
};

/// How well characteristic m currently separates row k from the rest of the
/// population, in [0, 1].
inline double distinguishability(const FeatureSet& features, int k, int m,
                                 DistinguishabilityMode mode, const MetricEvaluator& eval) {
    const int n = features.count();
    if (n < 2) throw std::invalid_argument("distinguishability: needs K >= 2");
    std::vector<double> c;
    c.reserve(static_cast<std::size_t>(n) - 1);
    for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        c.push_back(sameness_score(eval.distance(features.at(k, m), features.at(j, m), m)));
    }
    if (mode == DistinguishabilityMode::textual) {
        double p = 1.0;
        for (double cj : c) p *= (1.0 - cj);
        return p;
    }
    double p = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        double prod = 1.0;
        for (std::size_t q = 0; q < c.size(); ++q)
            if (q != j) prod *= (1.0 - c[q]);
        p += c[j] * prod;
    }
    return std::clamp(p, 0.0, 1.0);
}

/// Prevalence-based weights, one per characteristic, plus their normalized
/// copy (uniform fallback when everything collapses to zero).
struct WeightVector {
    Eigen::VectorXd raw;
    Eigen::VectorXd normalized;
};

inline WeightVector dynamic_weights(const FeatureSet& features, DistinguishabilityMode mode,
                                    const MetricEvaluator& eval) {
    const int n = features.count();
    const int m = features.characteristics();
    if (n < 2 || m < 1) throw std::invalid_argument("dynamic_weights: needs K >= 2, M >= 1");
    WeightVector w;
    w.raw.resize(m);
    for (int j = 0; j < m; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += distinguishability(features, k, j, mode, eval);
        w.raw(j) = acc / n;
    }
    const double total = w.raw.sum();
    w.normalized = total > 0.0 ? Eigen::VectorXd(w.raw / total)
                               : Eigen::VectorXd::Constant(m, 1.0 / m);
    return w;
}

inline WeightVector fixed_weights(const Eigen::VectorXd& raw) {
    if ((raw.array() < 0.0).any()) throw std::invalid_argument("fixed_weights: negative weight");
    WeightVector w;
    w.raw = raw;
    const double total = raw.sum();
    w.normalized = total > 0.0 ? Eigen::VectorXd(raw / total)
                               : Eigen::VectorXd::Constant(raw.size(), 1.0 / raw.size());
    return w;
}

enum class CostMode {
    paper_harmonic,     ///< D = sum_m w'(m) / c_m  (inverse harmonic-mean similarity)
    weighted_distance,  ///< D = sum_m w'(m) * distance_m
};

/// K x K matching costs; row i is measurement i, column j is prediction j.
inline Eigen::MatrixXd cost_matrix(const FeatureSet& measured, const FeatureSet& predicted,
                                   const WeightVector& weights, const MetricEvaluator& eval,
                                   CostMode mode = CostMode::paper_harmonic) {
    if (measured.count() != predicted.count() ||
        measured.characteristics() != predicted.characteristics())
        throw std::invalid_argument("cost_matrix: mismatched feature sets");
    const int n = measured.count();
    const int m = measured.characteristics();
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int q = 0; q < m; ++q) {
                const double dist = eval.distance(measured.at(i, q), predicted.at(j, q), q);
                acc += mode == CostMode::paper_harmonic
                           ? weights.normalized(q) / sameness_score(dist)
                           : weights.normalized(q) * dist;
            }
            d(i, j) = acc;
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Covariance estimation for the Mahalanobis metric
// ---------------------------------------------------------------------------

/// Regularized sample covariance of a pooled population; identity fallback
/// below dim+1 samples (Mahalanobis then degrades to Euclidean).
inline Eigen::MatrixXd mahalanobis_covariance(const std::vector<Eigen::VectorXd>& samples,
                                              double ridge = 1e-6) {
    if (samples.empty()) throw std::invalid_argument("mahalanobis_covariance: no samples");
    const auto dim = samples.front().size();
    if (static_cast<Eigen::Index>(samples.size()) < dim + 1)
        return Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (const auto& s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& s : samples) {
        const Eigen::VectorXd d = s - mean;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(samples.size() - 1);
    cov += ridge * Eigen::MatrixXd::Identity(dim, dim);
    return cov;
}

/// Sliding window of recent slot populations, one buffer per characteristic.
class FeatureHistory {
public:
    FeatureHistory(int characteristics, int window_slots)
        : window_(window_slots), buffers_(static_cast<std::size_t>(characteristics)) {
        if (window_slots < 1) throw std::invalid_argument("FeatureHistory: window must be >= 1");
    }

    void push(const FeatureSet& population) {
        for (int m = 0; m < population.characteristics(); ++m) {
            auto& buf = buffers_.at(static_cast<std::size_t>(m));
            std::vector<Eigen::VectorXd> slot;
            slot.reserve(static_cast<std::size_t>(population.count()));
            for (int k = 0; k < population.count(); ++k) slot.push_back(population.at(k, m));
            buf.push_back(std::move(slot));
            if (static_cast<int>(buf.size()) > window_) buf.pop_front();
        }
    }

    Eigen::MatrixXd covariance(int m, double ridge = 1e-6) const {
        const auto& buf = buffers_.at(static_cast<std::size_t>(m));
        std::vector<Eigen::VectorXd> pooled;
        for (const auto& slot : buf) pooled.insert(pooled.end(), slot.begin(), slot.end());
        return mahalanobis_covariance(pooled, ridge);
    }

private:
    int window_;
    std::vector<std::deque<std::vector<Eigen::VectorXd>>> buffers_;
};

// ---------------------------------------------------------------------------
// Linear assignment solvers
// ---------------------------------------------------------------------------

enum class AssignmentAlgorithm { greedy, auction, hungarian, lapjv, bruteforce };

struct Assignment {
    std::vector<int> row_to_col;
    double objective = 0.0;
};

namespace detail {

inline double row_ordered_objective(const Eigen::MatrixXd& d, const std::vector<int>& sol) {
    double acc = 0.0;
    for (std::size_t i = 0; i < sol.size(); ++i) acc += d(static_cast<int>(i), sol[i]);
    return acc;
}

/// Row-order first-come greedy: each row takes its cheapest free column.
inline std::vector<int> solve_greedy(const Eigen::MatrixXd& d) {
    const int n = static_cast<int>(d.rows());
    std::vector<int> sol(n, -1);
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
        int best = -1;
        for (int j = 0; j < n; ++j) {
            if (used[j]) continue;
            if (best < 0 || d(i, j) < d(i, best)) best = j;
        }
        sol[i] = best;
        used[best] = true;
    }
    return sol;
}

inline std::vector<int> solve_bruteforce(const Eigen::MatrixXd& d) {
    const int n = static_cast<int>(d.rows());
    if (n > 8) throw std::invalid_argument("solve_assignment: brute force limited to K <= 8");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_cost = row_ordered_objective(d, perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
        const double c = row_ordered_objective(d, perm);
        if (c < best_cost) {
            best_cost = c;
            best = perm;
        }
    }
    return best;
}

/// Shortest augmenting path method with dual potentials (Kuhn-Munkres line).
inline std::vector<int> solve_hungarian(const Eigen::MatrixXd& d) {
    const int n = static_cast<int>(d.rows());
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = d(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> sol(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j]) sol[p[j] - 1] = j - 1;
    return sol;
}

/// Jonker-Volgenant: column reduction, reduction transfer, two augmenting
/// row reduction sweeps, then shortest augmenting paths for the rest.
inline std::vector<int> solve_lapjv(const Eigen::MatrixXd& d) {
    const int n = static_cast<int>(d.rows());
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<int> rowsol(n, -1), colsol(n, -1);
    std::vector<double> v(n, 0.0);

    // Column reduction, scanning columns in reverse for better start duals.
    std::vector<int> matches(n, 0);
    for (int j = n - 1; j >= 0; --j) {
        double min = d(0, j);
        int imin = 0;
        for (int i = 1; i < n; ++i)
            if (d(i, j) < min) {
                min = d(i, j);
                imin = i;
            }
        v[j] = min;
        if (++matches[imin] == 1) {
            rowsol[imin] = j;
            colsol[j] = imin;
        } else {
            colsol[j] = -1;
        }
    }

    // Reduction transfer from singly-assigned rows.
    std::vector<int> free_rows;
    free_rows.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (matches[i] == 0) {
            free_rows.push_back(i);
        } else if (matches[i] == 1) {
            const int j1 = rowsol[i];
            double min = inf;
            for (int j = 0; j < n; ++j)
                if (j != j1) min = std::min(min, d(i, j) - v[j]);
            v[j1] -= min;
        }
    }

    // Augmenting row reduction, two sweeps.
    for (int sweep = 0; sweep < 2 && !free_rows.empty(); ++sweep) {
        std::vector<int> next_free;
        std::size_t k = 0;
        while (k < free_rows.size()) {
            const int i = free_rows[k++];
            double umin = d(i, 0) - v[0], usubmin = inf;
            int j1 = 0, j2 = -1;
            for (int j = 1; j < n; ++j) {
                const double h = d(i, j) - v[j];
                if (h < usubmin) {
                    if (h >= umin) {
                        usubmin = h;
                        j2 = j;
                    } else {
                        usubmin = umin;
                        j2 = j1;
                        umin = h;
                        j1 = j;
                    }
                }
            }
            int i0 = colsol[j1];
            if (umin < usubmin) {
                v[j1] -= usubmin - umin;
            } else if (i0 >= 0 && j2 >= 0) {
                j1 = j2;
                i0 = colsol[j1];
            }
            rowsol[i] = j1;
            colsol[j1] = i;
            if (i0 >= 0) {
                if (umin < usubmin) {
                    // Re-scan the displaced row immediately.
                    free_rows[--k] = i0;
                } else {
                    next_free.push_back(i0);
                }
            }
        }
        free_rows = std::move(next_free);
    }

    // Augmentation via Dijkstra shortest alternating paths.
    std::vector<double> dist(n);
    std::vector<int> pred(n);
    for (const int f : free_rows) {
        std::vector<char> done(n, 0);
        for (int j = 0; j < n; ++j) {
            dist[j] = d(f, j) - v[j];
            pred[j] = f;
        }
        int endofpath = -1;
        double mind = 0.0;
        std::vector<int> scanned;
        for (;;) {
            int jmin = -1;
            mind = inf;
            for (int j = 0; j < n; ++j)
                if (!done[j] && dist[j] < mind) {
                    mind = dist[j];
                    jmin = j;
                }
            done[jmin] = 1;
            scanned.push_back(jmin);
            if (colsol[jmin] < 0) {
                endofpath = jmin;
                break;
            }
            const int i = colsol[jmin];
            for (int j = 0; j < n; ++j) {
                if (done[j]) continue;
                const double alt = mind + d(i, j) - v[j] - (d(i, jmin) - v[jmin]);
                if (alt < dist[j]) {
                    dist[j] = alt;
                    pred[j] = i;
                }
            }
        }
        for (const int j : scanned)
            if (j != endofpath) v[j] += dist[j] - mind;
        // Unroll the alternating path.
        int j = endofpath;
        for (;;) {
            const int i = pred[j];
            colsol[j] = i;
            std::swap(rowsol[i], j);
            if (i == f) break;
        }
    }
    return rowsol;
}

/// Forward auction with epsilon scaling; epsilon-optimal for the final eps.
inline std::vector<int> solve_auction(const Eigen::MatrixXd& d, double eps_final) {
    const int n = static_cast<int>(d.rows());
    const double cmax = d.maxCoeff(), cmin = d.minCoeff();
    const double span = std::max(cmax - cmin, 0.0);
    if (eps_final <= 0.0) eps_final = std::max(1e-3 * span / n, 1e-12);
    // Benefits for maximization.
    Eigen::MatrixXd b = Eigen::MatrixXd::Constant(n, n, cmax) - d;
    std::vector<double> price(n, 0.0);
    double eps = std::max(span / 2.0, eps_final);
    std::vector<int> owner(n, -1), sol(n, -1);
    for (;;) {
        std::fill(owner.begin(), owner.end(), -1);
        std::fill(sol.begin(), sol.end(), -1);
        std::vector<int> queue(n);
        std::iota(queue.begin(), queue.end(), 0);
        while (!queue.empty()) {
            const int i = queue.back();
            queue.pop_back();
            int jbest = 0;
            double best = -std::numeric_limits<double>::infinity();
            double second = best;
            for (int j = 0; j < n; ++j) {
                const double val = b(i, j) - price[j];
                if (val > best) {
                    second = best;
                    best = val;
                    jbest = j;
                } else if (val > second) {
                    second = val;
                }
            }
            if (second == -std::numeric_limits<double>::infinity()) second = best;
            price[jbest] += best - second + eps;
            if (owner[jbest] >= 0) {
                sol[owner[jbest]] = -1;
                queue.push_back(owner[jbest]);
            }
            owner[jbest] = i;
            sol[i] = jbest;
        }
        if (eps <= eps_final) break;
        eps = std::max(eps / 4.0, eps_final);
    }
    return sol;
}

}  // namespace detail

/// Solve the K x K assignment problem. hungarian, lapjv and bruteforce are
/// exact; greedy is the first-come heuristic; auction is epsilon-optimal
/// (auction_eps <= 0 selects 1e-3 * (max-min)/K).
inline Assignment solve_assignment(const Eigen::MatrixXd& d, AssignmentAlgorithm alg,
                                   double auction_eps = 0.0) {
    if (d.rows() != d.cols() || d.rows() == 0)
        throw std::invalid_argument("solve_assignment: cost matrix must be square and non-empty");
    if (!d.allFinite())
        throw std::invalid_argument("solve_assignment: cost matrix must be finite");

    Assignment out;
    if (d.rows() == 1) {
        out.row_to_col = {0};
        out.objective = d(0, 0);
        return out;
    }
    switch (alg) {
        case AssignmentAlgorithm::greedy:
            out.row_to_col = detail::solve_greedy(d);
            break;
        case AssignmentAlgorithm::auction:
            out.row_to_col = detail::solve_auction(d, auction_eps);
            break;
        case AssignmentAlgorithm::hungarian:
            out.row_to_col = detail::solve_hungarian(d);
            break;
        case AssignmentAlgorithm::lapjv:
            out.row_to_col = detail::solve_lapjv(d);
            break;
        case AssignmentAlgorithm::bruteforce:
            out.row_to_col = detail::solve_bruteforce(d);
            break;
    }
    out.objective = detail::row_ordered_objective(d, out.row_to_col);
    return out;
}

}  // namespace uavbeam
