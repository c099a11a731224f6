#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace dttm {

// Dense row-major weight matrix: rows are targets, columns are detections.
class WeightMatrix {
public:
    WeightMatrix() = default;
    WeightMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), w_(rows * cols, fill) {}
    WeightMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t r, std::size_t c) const { return w_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return w_[r * cols_ + c]; }
    const std::vector<double>& values() const { return w_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> w_;
};

// (row, col) pairs sorted by row.
struct Assignment {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    bool operator==(const Assignment&) const = default;
};

// Sum of the matched weights, accumulated in row order.
double assignment_total(const WeightMatrix& w, const Assignment& a);

// Maximum-weight assignment of min(rows, cols) pairs (Kuhn-Munkres on the
// negated, zero-padded square matrix). Among equal-total optima the pairing
// whose per-row column sequence is lexicographically smallest is returned,
// with "unassigned" ordered after every real column.
Assignment solve_max_assignment(const WeightMatrix& w);

// Exhaustive oracle with the same optimality and tie-break contract. Refuses
// (throws dttm::Error) when min(rows, cols) > 8 or the number of injective
// maps exceeds kBruteForceLimit.
inline constexpr std::size_t kBruteForceMaxSide = 8;
inline constexpr double kBruteForceLimit = 5.0e7;
Assignment brute_force_assignment(const WeightMatrix& w);

} // namespace dttm
