#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace rohan {

struct Matching {
    std::vector<std::pair<int, int>> pairs;  // (row, col), sorted by row
    double total_cost = 0;                   // sum over the returned pairs
};

// Exact minimum-cost assignment (Kuhn-Munkres with potentials). Solves the
// full rectangular problem, matching min(rows, cols) pairs, then drops
// pairs whose cost exceeds `gate`. An empty matrix yields an empty
// matching.
Matching assign(const std::vector<std::vector<double>>& cost,
                double gate = std::numeric_limits<double>::infinity());

}  // namespace rohan
