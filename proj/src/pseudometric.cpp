#include "sdlab/pseudometric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sdlab {
namespace {

std::string fmt(const char* f, int a, int b, int c = -1) {
    char buf[128];
    if (c < 0)
        std::snprintf(buf, sizeof(buf), f, a, b);
    else
        std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

double pair_norm(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
    }
    return std::sqrt(s);
}

}  // namespace

std::vector<double> symmetrize(const FiniteDistance& fd) {
    const int n = fd.n;
    std::vector<double> ds(fd.d.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            ds[static_cast<size_t>(i) * n + j] = std::min(fd.at(i, j), fd.at(j, i));
    return ds;
}

double path_cost(const FiniteDistance& fd, const std::vector<int>& path) {
    require(!path.empty(), "path_cost: path must contain at least one state");
    for (int s : path) require(s >= 0 && s < fd.n, "path_cost: state index out of range");
    const std::vector<double> ds = symmetrize(fd);
    double cost = 0.0;
    for (size_t i = 0; i + 1 < path.size(); ++i)
        cost += ds[static_cast<size_t>(path[i]) * fd.n + path[i + 1]];
    return cost;
}

InducedMetric induce(const FiniteDistance& fd) {
    const int n = fd.n;
    InducedMetric im;
    im.n = n;
    im.dtilde = symmetrize(fd);
    for (int i = 0; i < n; ++i) im.dtilde[static_cast<size_t>(i) * n + i] = 0.0;
    // Floyd-Warshall; edge weights are non-negative, so the minimum over all
    // finite paths is attained on a simple path.
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const double dik = im.dtilde[static_cast<size_t>(i) * n + k];
            for (int j = 0; j < n; ++j) {
                const double via = dik + im.dtilde[static_cast<size_t>(k) * n + j];
                double& cur = im.dtilde[static_cast<size_t>(i) * n + j];
                if (via < cur) cur = via;
            }
        }
    return im;
}

CheckReport check_axioms(const InducedMetric& im, double tol) {
    const int n = im.n;
    for (int i = 0; i < n; ++i)
        if (std::abs(im.at(i, i)) > tol)
            return {false, fmt("nonzero diagonal at (%d,%d)", i, i)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(im.at(i, j) - im.at(j, i)) > tol)
                return {false, fmt("asymmetry at (%d,%d)", i, j)};
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                if (im.at(i, j) > im.at(i, k) + im.at(k, j) + tol)
                    return {false, fmt("triangle violation at (%d,%d,%d)", i, k, j)};
    return {true, ""};
}

CheckReport check_lower_bound(const FiniteDistance& fd, const InducedMetric& im, double tol) {
    require(fd.n == im.n, "check_lower_bound: size mismatch");
    for (int i = 0; i < fd.n; ++i)
        for (int j = 0; j < fd.n; ++j) {
            if (im.at(i, j) < -tol) return {false, fmt("negative value at (%d,%d)", i, j)};
            if (im.at(i, j) > fd.at(i, j) + tol)
                return {false, fmt("exceeds original distance at (%d,%d)", i, j)};
        }
    return {true, ""};
}

EquivalenceReport check_constraint_equivalence(const FiniteDistance& fd, const InducedMetric& im,
                                               const std::vector<std::vector<double>>& embeddings) {
    require(static_cast<int>(embeddings.size()) == fd.n,
            "check_constraint_equivalence: one embedding per state required");
    EquivalenceReport rep;
    rep.lhs_holds = true;
    rep.rhs_holds = true;
    for (int i = 0; i < fd.n; ++i)
        for (int j = 0; j < fd.n; ++j) {
            const double nrm = pair_norm(embeddings[i], embeddings[j]);
            if (nrm > fd.at(i, j)) rep.lhs_holds = false;
            if (nrm > im.at(i, j)) rep.rhs_holds = false;
        }
    rep.pass = rep.lhs_holds == rep.rhs_holds;
    if (!rep.pass)
        rep.detail = rep.lhs_holds ? "original constraint holds but induced constraint fails"
                                   : "induced constraint holds but original constraint fails";
    return rep;
}

}  // namespace sdlab
