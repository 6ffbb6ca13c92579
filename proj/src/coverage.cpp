#include "sdlab/coverage.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sdlab {

void CoverageGrid::add(const std::vector<double>& obs) {
    require(!dims.empty(), "coverage: grid has no dimensions configured");
    for (int d : dims)
        require(d >= 0 && d < static_cast<int>(obs.size()), "coverage: dim out of range");
    const long long bx = static_cast<long long>(std::floor(obs[dims[0]] / bin_size));
    const long long by = dims.size() == 2
                             ? static_cast<long long>(std::floor(obs[dims[1]] / bin_size))
                             : 0;
    occupied_.insert({bx, by});
}

long long state_coverage(const std::vector<std::vector<Transition>>& trajectories,
                         const std::vector<int>& dims, double bin_size) {
    CoverageGrid grid(dims, bin_size);
    for (const auto& traj : trajectories) {
        if (traj.empty()) continue;
        grid.add(traj.front().s);
        for (const Transition& t : traj) grid.add(t.s_next);
    }
    return grid.count();
}

long long coverage_from_csv(const std::string& path, const std::vector<int>& dims,
                            double bin_size) {
    std::ifstream in(path);
    require(in.good(), "coverage: cannot open log file " + path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "coverage: empty log file");

    // map requested obs dims to column indices via the header
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    std::vector<int> cols;
    for (int d : dims) {
        const std::string want = "obs_" + std::to_string(d);
        int found = -1;
        for (size_t c = 0; c < header.size(); ++c)
            if (header[c] == want) found = static_cast<int>(c);
        require(found >= 0, "coverage: column " + want + " not found in log");
        cols.push_back(found);
    }

    CoverageGrid grid(std::vector<int>(dims.size() == 2 ? std::vector<int>{0, 1}
                                                        : std::vector<int>{0}),
                      bin_size);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        std::vector<double> point;
        for (int c : cols) {
            require(c < static_cast<int>(cells.size()), "coverage: short row in log");
            point.push_back(std::stod(cells[c]));
        }
        grid.add(point);
    }
    return grid.count();
}

}  // namespace sdlab
