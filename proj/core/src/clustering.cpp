#include "argap/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "argap/distance.hpp"
#include "argap/errors.hpp"
#include "argap/parallel.hpp"
#include "argap/rng.hpp"

namespace argap {

namespace {

constexpr double kImprovementEps = 1e-12;

// Nearest/second-nearest medoid bookkeeping for the swap search.
struct NearestInfo {
    std::vector<int> nearest_slot;  // index into medoids
    std::vector<double> d1, d2;
    double total = 0.0;
};

NearestInfo compute_nearest(const DistanceTable& t, const std::vector<int>& medoids) {
    const int n = t.size();
    const int m = static_cast<int>(medoids.size());
    NearestInfo info;
    info.nearest_slot.assign(static_cast<std::size_t>(n), 0);
    info.d1.assign(static_cast<std::size_t>(n), 0.0);
    info.d2.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        double best = std::numeric_limits<double>::infinity();
        double second = std::numeric_limits<double>::infinity();
        int best_slot = 0;
        for (int s = 0; s < m; ++s) {
            const double d = t.entry(medoids[static_cast<std::size_t>(s)], j);
            if (d < best) {
                second = best;
                best = d;
                best_slot = s;
            } else if (d < second) {
                second = d;
            }
        }
        info.nearest_slot[static_cast<std::size_t>(j)] = best_slot;
        info.d1[static_cast<std::size_t>(j)] = best;
        info.d2[static_cast<std::size_t>(j)] = second;
        info.total += best;
    }
    return info;
}

// Steepest-descent swap search.  Evaluates every (candidate, medoid) swap in
// O(n^2 + nM) per sweep: for a fixed candidate h the removal corrections for
// all M medoids are accumulated in one pass over the points.
ClusteringResult swap_search(const DistanceTable& t, std::vector<int> medoids) {
    const int n = t.size();
    const int m = static_cast<int>(medoids.size());
    std::vector<char> is_medoid(static_cast<std::size_t>(n), 0);
    for (int id : medoids) is_medoid[static_cast<std::size_t>(id)] = 1;

    NearestInfo info = compute_nearest(t, medoids);
    std::vector<double> removal(static_cast<std::size_t>(m));

    const long max_sweeps = 64L + 16L * static_cast<long>(m) * n;  // strict descent terminates
    for (long sweep = 0; sweep < max_sweeps; ++sweep) {
        double best_delta = -kImprovementEps;
        int best_h = -1, best_slot = -1;

        for (int h = 0; h < n; ++h) {
            if (is_medoid[static_cast<std::size_t>(h)]) continue;
            const double* dh_row = t.row(h);
            double shared = 0.0;
            std::fill(removal.begin(), removal.end(), 0.0);
            for (int j = 0; j < n; ++j) {
                const double dh = dh_row[j];
                const double d1 = info.d1[static_cast<std::size_t>(j)];
                if (dh < d1) {
                    shared += dh - d1;  // improves regardless of which medoid leaves
                } else {
                    const double d2 = info.d2[static_cast<std::size_t>(j)];
                    const double repl = std::min(dh, d2) - d1;
                    if (repl != 0.0) removal[static_cast<std::size_t>(info.nearest_slot[static_cast<std::size_t>(j)])] += repl;
                }
            }
            for (int s = 0; s < m; ++s) {
                const double delta = shared + removal[static_cast<std::size_t>(s)];
                if (delta < best_delta) {
                    best_delta = delta;
                    best_h = h;
                    best_slot = s;
                }
            }
        }

        if (best_h < 0) break;
        is_medoid[static_cast<std::size_t>(medoids[static_cast<std::size_t>(best_slot)])] = 0;
        is_medoid[static_cast<std::size_t>(best_h)] = 1;
        medoids[static_cast<std::size_t>(best_slot)] = best_h;
        info = compute_nearest(t, medoids);
    }

    // Final assignments per the nearest-medoid rule: medoids to themselves,
    // ties to the lowest medoid index.
    std::sort(medoids.begin(), medoids.end());
    ClusteringResult result;
    result.medoid_indices = medoids;
    result.assignments.assign(static_cast<std::size_t>(n), 0);
    double wcsd = 0.0;
    for (int j = 0; j < n; ++j) {
        int best_slot = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int s = 0; s < m; ++s) {
            const int id = medoids[static_cast<std::size_t>(s)];
            if (id == j) {
                best_slot = s;
                best = 0.0;
                break;
            }
            const double d = t.entry(id, j);
            if (d < best) {
                best = d;
                best_slot = s;
            }
        }
        result.assignments[static_cast<std::size_t>(j)] = best_slot;
        wcsd += best;
    }
    result.wcsd = wcsd;
    return result;
}

std::vector<int> farthest_point_seed(const DistanceTable& t, int m, int first) {
    const int n = t.size();
    std::vector<int> medoids{first};
    std::vector<double> d1(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) d1[static_cast<std::size_t>(j)] = t.entry(first, j);
    while (static_cast<int>(medoids.size()) < m) {
        int next = -1;
        double far = -1.0;
        for (int j = 0; j < n; ++j) {
            if (std::find(medoids.begin(), medoids.end(), j) != medoids.end()) continue;
            if (d1[static_cast<std::size_t>(j)] > far) {
                far = d1[static_cast<std::size_t>(j)];
                next = j;
            }
        }
        medoids.push_back(next);
        for (int j = 0; j < n; ++j)
            d1[static_cast<std::size_t>(j)] = std::min(d1[static_cast<std::size_t>(j)], t.entry(next, j));
    }
    return medoids;
}

}  // namespace

DistanceTable pairwise_distances(const std::vector<Filter>& filters, double sigma2, int n_threads) {
    const int n = static_cast<int>(filters.size());
    if (n == 0) throw std::invalid_argument("pairwise_distances requires at least one filter");
    const int L = filters.front().length();
    for (const auto& f : filters) {
        if (f.length() != L) throw LengthMismatch("filters must share one length");
        if (!is_stable(f.coefficients())) throw UnstableGenerator("all filters must be stable");
    }

    std::vector<std::vector<std::complex<double>>> roots(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), n_threads,
                 [&](std::size_t i) { roots[i] = characteristic_roots(filters[i]); });

    DistanceTable table(n);
    parallel_for(static_cast<std::size_t>(n), n_threads, [&](std::size_t i) {
        for (int j = 0; j < n; ++j) {
            if (static_cast<int>(i) == j) continue;
            table.entry(static_cast<int>(i), j) = detail::distance_with_roots(
                roots[i], roots[static_cast<std::size_t>(j)], filters[i],
                filters[static_cast<std::size_t>(j)], sigma2);
        }
    });
    return table;
}

ClusteringResult k_medoids_refine(const DistanceTable& table, std::vector<int> initial_medoids) {
    const int n = table.size();
    const int m = static_cast<int>(initial_medoids.size());
    if (m < 1 || m > n) throw InvalidM("medoid count must be in [1, n]");
    if (m == n) {
        ClusteringResult all;
        all.medoid_indices.resize(static_cast<std::size_t>(n));
        all.assignments.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            all.medoid_indices[static_cast<std::size_t>(j)] = j;
            all.assignments[static_cast<std::size_t>(j)] = j;
        }
        return all;
    }
    return swap_search(table, std::move(initial_medoids));
}

ClusteringResult k_medoids(const DistanceTable& table, int n_clusters, std::uint64_t rng_seed,
                           int n_restarts) {
    const int n = table.size();
    if (n_clusters < 1 || n_clusters > n) throw InvalidM("cluster count must be in [1, n]");
    if (n_restarts < 1) n_restarts = 1;

    if (n_clusters == n) {
        std::vector<int> all(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) all[static_cast<std::size_t>(j)] = j;
        return k_medoids_refine(table, std::move(all));
    }

    if (n_clusters == 1) {
        // Exact: the medoid minimizing its row sum.
        int best = 0;
        double best_sum = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += table.entry(i, j);
            if (s < best_sum) {
                best_sum = s;
                best = i;
            }
        }
        ClusteringResult one;
        one.medoid_indices = {best};
        one.assignments.assign(static_cast<std::size_t>(n), 0);
        one.wcsd = best_sum;
        return one;
    }

    ClusteringResult best;
    bool have_best = false;
    for (int r = 0; r < n_restarts; ++r) {
        Rng rng(derive_seed(rng_seed, static_cast<std::uint64_t>(r)));
        const int first = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
        auto result = swap_search(table, farthest_point_seed(table, n_clusters, first));
        if (!have_best || result.wcsd < best.wcsd) {
            best = std::move(result);
            have_best = true;
        }
    }
    return best;
}

}  // namespace argap
