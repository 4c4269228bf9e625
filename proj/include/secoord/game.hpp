#ifndef SECOORD_GAME_HPP
#define SECOORD_GAME_HPP

#include <cstddef>
#include <vector>

namespace secoord {

/// Value and optimal mixed strategies of a finite zero-sum matrix game where
/// the row player maximizes M[row][col] and the column player minimizes.
struct GameSolution {
    double value = 0.0;
    std::vector<double> row_mix;
    std::vector<double> col_mix;
};

/// Exact solve (LP via dense simplex; closed forms for one or two columns).
/// Rows/cols must be non-empty and rectangular.
GameSolution solve_zero_sum(const std::vector<std::vector<double>>& payoff);

} // namespace secoord

#endif
