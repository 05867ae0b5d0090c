#pragma once

#include <cstdint>
#include <vector>

#include "argap/filter.hpp"

namespace argap {

// Dense pairwise-distance table; entry(i, j) = D(filter_i, filter_j) with
// filter_i in the generator (medoid) slot.  D is asymmetric, so the table
// carries no symmetry invariant; the diagonal is exactly zero.
class DistanceTable {
public:
    explicit DistanceTable(int n) : n_(n), entries_(static_cast<std::size_t>(n) * n, 0.0) {}

    int size() const { return n_; }
    double entry(int i, int j) const { return entries_[static_cast<std::size_t>(i) * n_ + j]; }
    double& entry(int i, int j) { return entries_[static_cast<std::size_t>(i) * n_ + j]; }
    const double* row(int i) const { return entries_.data() + static_cast<std::size_t>(i) * n_; }

private:
    int n_;
    std::vector<double> entries_;
};

DistanceTable pairwise_distances(const std::vector<Filter>& filters, double sigma2,
                                 int n_threads = 1);

// Clustering under the oriented distance: a point's cost is the distance
// *from* its medoid, matching the medoid's generator role.
struct ClusteringResult {
    std::vector<int> medoid_indices;  // ascending point ids, size M
    std::vector<int> assignments;     // for each point, index into medoid_indices
    double wcsd = 0.0;                // sum over points of entry(medoid, point)
};

// PAM-style k-medoids: greedy farthest-point seeding from a random first
// medoid, then steepest-descent swap search; best of n_restarts by WCSD
// (ties to the lowest restart index).  Throws InvalidM unless 1 <= M <= n.
ClusteringResult k_medoids(const DistanceTable& table, int n_clusters, std::uint64_t rng_seed,
                           int n_restarts = 20);

// Swap local search from an explicit initial medoid set (distinct indices).
// Used for warm starts when sweeping M; same convergence rule as k_medoids.
ClusteringResult k_medoids_refine(const DistanceTable& table, std::vector<int> initial_medoids);

}  // namespace argap
