#include "rohan/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rohan/errors.hpp"

namespace rohan {

namespace {

// Hungarian algorithm in the potentials formulation; rows <= cols required.
// Returns, per row, the matched column index. O(rows^2 * cols).
std::vector<int> solve(const std::vector<std::vector<double>>& a, size_t rows, size_t cols) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(rows + 1, 0), v(cols + 1, 0);
    std::vector<int> p(cols + 1, 0), way(cols + 1, 0);
    for (size_t i = 1; i <= rows; ++i) {
        p[0] = int(i);
        int j0 = 0;
        std::vector<double> minv(cols + 1, inf);
        std::vector<char> used(cols + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            double delta = inf;
            for (size_t j = 1; j <= cols; ++j) {
                if (used[j]) continue;
                double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = int(j);
                }
            }
            for (size_t j = 0; j <= cols; ++j) {
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
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> match(rows, -1);
    for (size_t j = 1; j <= cols; ++j)
        if (p[j]) match[p[j] - 1] = int(j) - 1;
    return match;
}

}  // namespace

Matching assign(const std::vector<std::vector<double>>& cost, double gate) {
    Matching m;
    const size_t rows = cost.size();
    if (rows == 0) return m;
    const size_t cols = cost[0].size();
    for (const auto& row : cost)
        if (row.size() != cols)
            throw internal_error("assign: ragged cost matrix");
    if (cols == 0) return m;
    for (const auto& row : cost)
        for (double c : row)
            if (!std::isfinite(c)) throw internal_error("assign: non-finite cost");

    std::vector<int> match;
    if (rows <= cols) {
        match = solve(cost, rows, cols);
    } else {
        std::vector<std::vector<double>> t(cols, std::vector<double>(rows));
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) t[j][i] = cost[i][j];
        std::vector<int> tmatch = solve(t, cols, rows);
        match.assign(rows, -1);
        for (size_t j = 0; j < cols; ++j)
            if (tmatch[j] >= 0) match[tmatch[j]] = int(j);
    }

    for (size_t i = 0; i < rows; ++i) {
        if (match[i] < 0) continue;
        const double c = cost[i][match[i]];
        if (c > gate) continue;
        m.pairs.emplace_back(int(i), match[i]);
        m.total_cost += c;
    }
    std::sort(m.pairs.begin(), m.pairs.end());
    return m;
}

}  // namespace rohan
