#pragma once

#include "telesum/ratfunc.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace telesum {

/// Affine description of the solution set of M x = b.
/// particular has every free column set to 0; nullspace holds one basis
/// vector per free column (the column index is carried alongside), so the
/// full set is particular + span(nullspace).
template <class F>
struct LinearSolution {
    std::vector<F> particular;
    std::vector<std::pair<size_t, std::vector<F>>> nullspace;
};

/// Exact Gauss-Jordan over a field. Columns are eliminated left to right,
/// so callers choose which unknowns soak up the freedom by column order
/// (later columns go free first when the system is underdetermined).
/// Returns nullopt exactly when the system is inconsistent.
template <class F>
std::optional<LinearSolution<F>> solve_linear_system(std::vector<std::vector<F>> m, std::vector<F> rhs) {
    const size_t rows = m.size();
    const size_t cols = rows ? m[0].size() : 0;
    for (const auto& r : m)
        if (r.size() != cols) throw std::invalid_argument("solve_linear_system: ragged matrix");
    if (rhs.size() != rows) throw std::invalid_argument("solve_linear_system: rhs size mismatch");

    std::vector<int> pivot_of_col(cols, -1);
    size_t row = 0;
    for (size_t col = 0; col < cols && row < rows; ++col) {
        size_t pr = row;
        while (pr < rows && m[pr][col].is_zero()) ++pr;
        if (pr == rows) continue;
        std::swap(m[pr], m[row]);
        std::swap(rhs[pr], rhs[row]);
        F inv = F(1) / m[row][col];
        for (size_t j = col; j < cols; ++j) m[row][j] = m[row][j] * inv;
        rhs[row] = rhs[row] * inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == row || m[i][col].is_zero()) continue;
            F f = m[i][col];
            for (size_t j = col; j < cols; ++j) m[i][j] = m[i][j] - f * m[row][j];
            rhs[i] = rhs[i] - f * rhs[row];
        }
        pivot_of_col[col] = static_cast<int>(row);
        ++row;
    }
    for (size_t i = row; i < rows; ++i)
        if (!rhs[i].is_zero()) return std::nullopt;

    LinearSolution<F> sol;
    sol.particular.assign(cols, F(0));
    for (size_t col = 0; col < cols; ++col)
        if (pivot_of_col[col] >= 0) sol.particular[col] = rhs[pivot_of_col[col]];
    for (size_t fc = 0; fc < cols; ++fc) {
        if (pivot_of_col[fc] >= 0) continue;
        std::vector<F> v(cols, F(0));
        v[fc] = F(1);
        for (size_t col = 0; col < cols; ++col)
            if (pivot_of_col[col] >= 0) v[col] = F(0) - m[pivot_of_col[col]][fc];
        sol.nullspace.emplace_back(fc, std::move(v));
    }
    return sol;
}

}  // namespace telesum
