#include "dttm/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dttm/error.hpp"

namespace dttm {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Equality subgraph of the optimal dual solution, with a perfect matching.
struct TightGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::size_t>> neighbors;  // ascending column order
    std::vector<std::size_t> col_of;
    std::vector<std::size_t> row_of;
};

// Alternating path from `row` that ends by taking `target_col`, using only rows
// strictly greater than `floor_row`. Rewrites the matching along the path.
bool augment_to(TightGraph& g, std::size_t row, std::size_t target_col, std::size_t floor_row,
                std::vector<char>& visited_col) {
    for (std::size_t col : g.neighbors[row]) {
        if (visited_col[col]) continue;
        visited_col[col] = 1;
        if (col == target_col) {
            g.col_of[row] = col;
            g.row_of[col] = row;
            return true;
        }
        const std::size_t owner = g.row_of[col];
        if (owner == kNone || owner <= floor_row) continue;
        if (augment_to(g, owner, target_col, floor_row, visited_col)) {
            g.col_of[row] = col;
            g.row_of[col] = row;
            return true;
        }
    }
    return false;
}

// Rewrites the perfect matching into the lexicographically smallest perfect
// matching of the tight graph (row 0 takes the smallest feasible column, ...).
void lexicographic_minimum(TightGraph& g) {
    std::vector<char> visited(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t j : g.neighbors[i]) {
            const std::size_t current = g.col_of[i];
            if (j >= current) break;
            const std::size_t owner = g.row_of[j];
            if (owner < i) continue;
            std::fill(visited.begin(), visited.end(), 0);
            visited[j] = 1;
            if (augment_to(g, owner, current, i, visited)) {
                g.col_of[i] = j;
                g.row_of[j] = i;
                break;
            }
        }
    }
}

} // namespace

WeightMatrix::WeightMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), w_(std::move(values)) {
    if (w_.size() != rows_ * cols_) throw ShapeError("weight matrix value count does not match rows * cols");
    for (double x : w_)
        if (!std::isfinite(x)) throw Error("weight matrix entries must be finite");
}

double assignment_total(const WeightMatrix& w, const Assignment& a) {
    double total = 0.0;
    for (const auto& [r, c] : a.pairs) total += w(r, c);
    return total;
}

Assignment solve_max_assignment(const WeightMatrix& w) {
    Assignment out;
    if (w.rows() == 0 || w.cols() == 0) return out;

    const std::size_t n = std::max(w.rows(), w.cols());
    double scale = 1.0;
    std::vector<double> cost(n * n, 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r)
        for (std::size_t c = 0; c < w.cols(); ++c) {
            cost[r * n + c] = -w(r, c);
            scale = std::max(scale, std::abs(w(r, c)));
        }

    // Kuhn-Munkres with potentials, minimization form, 1-based with a virtual column 0.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    auto a = [&](std::size_t i, std::size_t j) { return cost[(i - 1) * n + (j - 1)]; };
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
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
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    TightGraph g;
    g.n = n;
    g.neighbors.resize(n);
    g.col_of.assign(n, kNone);
    g.row_of.assign(n, kNone);
    for (std::size_t j = 1; j <= n; ++j) {
        g.col_of[p[j] - 1] = j - 1;
        g.row_of[j - 1] = p[j] - 1;
    }
    const double tol = 1e-9 * scale;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (j == g.col_of[i] || a(i + 1, j + 1) - u[i + 1] - v[j + 1] <= tol) g.neighbors[i].push_back(j);
    lexicographic_minimum(g);

    for (std::size_t r = 0; r < w.rows(); ++r)
        if (g.col_of[r] < w.cols()) out.pairs.emplace_back(r, g.col_of[r]);
    return out;
}

Assignment brute_force_assignment(const WeightMatrix& w) {
    Assignment best;
    const std::size_t rows = w.rows(), cols = w.cols();
    if (rows == 0 || cols == 0) return best;
    const std::size_t k = std::min(rows, cols);
    double count = 1.0;
    for (std::size_t i = 0; i < k; ++i) count *= static_cast<double>(std::max(rows, cols) - i);
    if (k > kBruteForceMaxSide || count > kBruteForceLimit)
        throw Error("brute force assignment refused for " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " matrix");

    // Rows are visited in order; each takes an unused column (ascending) or, while
    // rows outnumber columns, stays unassigned (ordered after every column).
    std::size_t unassigned_budget = rows - k;
    std::vector<char> col_used(cols, 0);
    std::vector<std::size_t> choice(rows, kNone);
    double best_total = -std::numeric_limits<double>::infinity();
    Assignment current;

    auto visit = [&](auto&& self, std::size_t r) -> void {
        if (r == rows) {
            current.pairs.clear();
            for (std::size_t i = 0; i < rows; ++i)
                if (choice[i] != kNone) current.pairs.emplace_back(i, choice[i]);
            const double total = assignment_total(w, current);
            if (total > best_total) {
                best_total = total;
                best = current;
            }
            return;
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (col_used[c]) continue;
            col_used[c] = 1;
            choice[r] = c;
            self(self, r + 1);
            col_used[c] = 0;
        }
        if (unassigned_budget > 0) {
            --unassigned_budget;
            choice[r] = kNone;
            self(self, r + 1);
            ++unassigned_budget;
        }
    };
    visit(visit, 0);
    return best;
}

} // namespace dttm
