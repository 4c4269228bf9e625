#include "secoord/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "secoord/common.hpp"

namespace secoord {

namespace {

GameSolution solve_one_column(const std::vector<std::vector<double>>& m) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < m.size(); ++i)
        if (m[i][0] > m[best][0]) best = i;
    GameSolution s;
    s.value = m[best][0];
    s.row_mix.assign(m.size(), 0.0);
    s.row_mix[best] = 1.0;
    s.col_mix = {1.0};
    return s;
}

// Two adversary actions: the optimum mixes at most two rows. Enumerate pure
// rows and row-pair crossings; exact.
GameSolution solve_two_columns(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    GameSolution best;
    best.value = -std::numeric_limits<double>::infinity();
    auto consider = [&](std::size_t i, std::size_t j, double alpha) {
        double f0 = alpha * m[i][0] + (1.0 - alpha) * m[j][0];
        double f1 = alpha * m[i][1] + (1.0 - alpha) * m[j][1];
        double v = std::min(f0, f1);
        if (v > best.value + 1e-15) {
            best.value = v;
            best.row_mix.assign(n, 0.0);
            best.row_mix[i] += alpha;
            best.row_mix[j] += 1.0 - alpha;
        }
    };
    for (std::size_t i = 0; i < n; ++i) consider(i, i, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // alpha equalizing the two columns
            double denom = (m[i][0] - m[j][0]) - (m[i][1] - m[j][1]);
            if (std::abs(denom) < 1e-300) continue;
            double alpha = (m[j][1] - m[j][0]) / denom;
            if (alpha > 0.0 && alpha < 1.0) consider(i, j, alpha);
        }
    }
    // Column mix from the dual: find the column(s) active at the optimum.
    double f0 = 0.0, f1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        f0 += best.row_mix[i] * m[i][0];
        f1 += best.row_mix[i] * m[i][1];
    }
    best.col_mix.assign(2, 0.0);
    if (std::abs(f0 - f1) <= 1e-9) {
        best.col_mix = {0.5, 0.5};
    } else if (f0 < f1) {
        best.col_mix[0] = 1.0;
    } else {
        best.col_mix[1] = 1.0;
    }
    return best;
}

// General case: shift payoffs positive and solve
//   max sum(w)  s.t.  M w <= 1, w >= 0        (column player's scaled mix)
// by primal simplex with slack starting basis. Row mix recovered from the
// optimal duals. Value = 1/sum(w) + shift.
GameSolution solve_simplex(const std::vector<std::vector<double>>& m) {
    const std::size_t rows = m.size(), cols = m[0].size();
    double lo = m[0][0];
    for (const auto& r : m)
        for (double v : r) lo = std::min(lo, v);
    const double shift = 1.0 - lo; // all entries >= 1

    // tableau: rows constraints, columns = cols structural + rows slacks + rhs
    const std::size_t width = cols + rows + 1;
    std::vector<std::vector<double>> t(rows + 1, std::vector<double>(width, 0.0));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) t[i][j] = m[i][j] + shift;
        t[i][cols + i] = 1.0;
        t[i][width - 1] = 1.0;
    }
    for (std::size_t j = 0; j < cols; ++j) t[rows][j] = -1.0; // maximize sum w

    std::vector<std::size_t> basis(rows);
    for (std::size_t i = 0; i < rows; ++i) basis[i] = cols + i;

    for (std::size_t iter = 0; iter < 10000; ++iter) {
        // Bland's rule: first negative reduced cost
        std::size_t pivot_col = width - 1;
        for (std::size_t j = 0; j + 1 < width; ++j) {
            if (t[rows][j] < -1e-12) {
                pivot_col = j;
                break;
            }
        }
        if (pivot_col == width - 1) break; // optimal

        std::size_t pivot_row = rows;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rows; ++i) {
            if (t[i][pivot_col] > 1e-12) {
                double ratio = t[i][width - 1] / t[i][pivot_col];
                if (ratio < best_ratio - 1e-15 ||
                    (ratio < best_ratio + 1e-15 && (pivot_row == rows || basis[i] < basis[pivot_row]))) {
                    best_ratio = ratio;
                    pivot_row = i;
                }
            }
        }
        if (pivot_row == rows)
            throw internal_error("zero-sum LP unbounded; payoff matrix not shifted positive?");

        const double pv = t[pivot_row][pivot_col];
        for (auto& v : t[pivot_row]) v /= pv;
        for (std::size_t i = 0; i <= rows; ++i) {
            if (i == pivot_row) continue;
            const double f = t[i][pivot_col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[pivot_row][j];
        }
        basis[pivot_row] = pivot_col;
    }

    double wsum = 0.0;
    std::vector<double> w(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        if (basis[i] < cols) w[basis[i]] = t[i][width - 1];
    for (double v : w) wsum += v;
    if (!(wsum > 0.0)) throw internal_error("zero-sum LP produced empty column mix");

    GameSolution s;
    s.value = 1.0 / wsum - shift;
    s.col_mix.resize(cols);
    for (std::size_t j = 0; j < cols; ++j) s.col_mix[j] = w[j] / wsum;
    // duals sit in the slack columns of the objective row
    s.row_mix.resize(rows);
    double ysum = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        double y = t[rows][cols + i];
        s.row_mix[i] = y > 0.0 ? y : 0.0;
        ysum += s.row_mix[i];
    }
    if (ysum > 0.0)
        for (double& v : s.row_mix) v /= ysum;
    else
        s.row_mix.assign(rows, 1.0 / static_cast<double>(rows));
    return s;
}

} // namespace

GameSolution solve_zero_sum(const std::vector<std::vector<double>>& payoff) {
    if (payoff.empty() || payoff[0].empty())
        throw config_error("zero-sum game needs at least one row and column");
    const std::size_t cols = payoff[0].size();
    for (const auto& r : payoff)
        if (r.size() != cols) throw config_error("ragged zero-sum payoff matrix");
    if (cols == 1) return solve_one_column(payoff);
    if (cols == 2) return solve_two_columns(payoff);
    return solve_simplex(payoff);
}

} // namespace secoord
