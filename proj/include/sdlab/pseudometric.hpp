#pragma once

#include <string>
#include <vector>

#include "sdlab/contract.hpp"

namespace sdlab {

// Arbitrary non-negative function d on a finite state set, stored dense.
// Asymmetry is allowed and the diagonal need not be zero.
struct FiniteDistance {
    static constexpr int kMaxStates = 64;

    int n = 0;
    std::vector<double> d;  // n*n, row-major

    FiniteDistance() = default;
    FiniteDistance(int n_states, std::vector<double> entries) : n(n_states), d(std::move(entries)) {
        require(n >= 1 && n <= kMaxStates, "finite distance: state count out of range");
        require(static_cast<int>(d.size()) == n * n, "finite distance: matrix size mismatch");
        for (double v : d) require(v >= 0.0, "finite distance: entries must be non-negative");
    }

    double at(int i, int j) const { return d[static_cast<size_t>(i) * n + j]; }
};

// Shortest-path closure of the symmetrized distance; zero diagonal,
// symmetric, and triangle inequality hold by construction.
struct InducedMetric {
    int n = 0;
    std::vector<double> dtilde;

    double at(int i, int j) const { return dtilde[static_cast<size_t>(i) * n + j]; }
};

// Elementwise min(d, d^T).
std::vector<double> symmetrize(const FiniteDistance& fd);

// Sum of symmetrized edge costs along `path`; a single-state path costs 0.
double path_cost(const FiniteDistance& fd, const std::vector<int>& path);

// All-pairs shortest path over the symmetrized matrix with the diagonal
// forced to zero. On a finite state set the infimum over paths is attained.
InducedMetric induce(const FiniteDistance& fd);

struct CheckReport {
    bool pass = true;
    std::string detail;  // first violation when !pass
};

// Verifies zero diagonal, symmetry, and the triangle inequality over all
// triples.
CheckReport check_axioms(const InducedMetric& im, double tol = 0.0);

// Verifies 0 <= dtilde(x, y) <= d(x, y) for all pairs.
CheckReport check_lower_bound(const FiniteDistance& fd, const InducedMetric& im, double tol = 0.0);

struct EquivalenceReport {
    bool lhs_holds = false;  // all pairs satisfy ||phi(x)-phi(y)|| <= d(x,y)
    bool rhs_holds = false;  // all pairs satisfy ||phi(x)-phi(y)|| <= dtilde(x,y)
    bool pass = false;       // the two sides agree
    std::string detail;
};

// Checks that constraining an embedding by d and by dtilde accept or reject
// together on this instance. embeddings[i] is phi(state i).
EquivalenceReport check_constraint_equivalence(const FiniteDistance& fd, const InducedMetric& im,
                                               const std::vector<std::vector<double>>& embeddings);

}  // namespace sdlab
