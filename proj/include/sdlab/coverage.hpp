#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sdlab/env.hpp"

namespace sdlab {

// Occupancy grid over 1 or 2 observation dimensions. Bins are half-open
// intervals of width bin_size; the occupied set only ever grows.
struct CoverageGrid {
    double bin_size = 0.1;
    std::vector<int> dims;

    CoverageGrid() = default;
    CoverageGrid(std::vector<int> dims_, double bin = 0.1) : bin_size(bin), dims(std::move(dims_)) {
        require(dims.size() == 1 || dims.size() == 2, "coverage: select 1 or 2 dimensions");
        require(bin_size > 0.0, "coverage: bin size must be positive");
    }

    void add(const std::vector<double>& obs);
    long long count() const { return static_cast<long long>(occupied_.size()); }

private:
    std::set<std::pair<long long, long long>> occupied_;
};

// Distinct bins visited by the selected observation dims over all
// trajectory states. Empty input yields 0.
long long state_coverage(const std::vector<std::vector<Transition>>& trajectories,
                         const std::vector<int>& dims, double bin_size);

// Same count read back from a trajectory CSV (columns episode,t,obs_*,...).
long long coverage_from_csv(const std::string& path, const std::vector<int>& dims,
                            double bin_size);

}  // namespace sdlab
