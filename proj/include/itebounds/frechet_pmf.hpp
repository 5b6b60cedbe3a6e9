#pragma once

// Sharp bounds on P(Y1 - Y0 = delta) for arbitrary finite-support marginals,
// with constructive extremal couplings attaining each endpoint. The lower
// endpoint is certified by a min-cost transportation solve (cost 1 on matched
// cells); the upper endpoint by an explicit permutation + product-fill
// construction.

#include "itebounds/core.hpp"
#include "itebounds/oracle.hpp"

namespace iteb {

// Fréchet inequality bounds for one matched cell (y1 = i, y0 = i - delta).
struct CellBound {
    double y1 = 0.0;
    double y0 = 0.0;
    std::size_t row = 0;  // index into pmf1 support
    std::size_t col = 0;  // index into pmf0 support
    double lower = 0.0;
    double upper = 0.0;
};

// One CellBound per support point i of Y1 with i - delta in the support of
// Y0; unmatched cells contribute [0, 0] and are omitted.
inline std::vector<CellBound> frechet_cell_bounds(const DiscretePMF& pmf1,
                                                  const DiscretePMF& pmf0,
                                                  double delta) {
    std::vector<CellBound> cells;
    std::size_t positive_lower = 0;
    for (std::size_t i = 0; i < pmf1.size(); ++i) {
        auto j = pmf0.index_of(pmf1.support()[i] - delta);
        if (!j) continue;
        const double p1 = pmf1.probs()[i];
        const double p0 = pmf0.probs()[*j];
        CellBound cell;
        cell.y1 = pmf1.support()[i];
        cell.y0 = pmf0.support()[*j];
        cell.row = i;
        cell.col = *j;
        cell.lower = std::max(p1 + p0 - 1.0, 0.0);
        cell.upper = std::min(p1, p0);
        if (cell.lower > 0.0) ++positive_lower;
        cells.push_back(cell);
    }
    // Matched cells occupy distinct rows and columns, so at most one
    // Fréchet lower bound can be positive.
    if (positive_lower > 1) {
        throw std::logic_error("frechet_cell_bounds: multiple positive lower bounds");
    }
    return cells;
}

// Coupling with P(Y1 = i, Y0 = i - delta) = U_i on every matched cell.
// Rows whose upper bound equals the row margin are forced first (ties go to
// the row side), then columns forced by their margin, then the residual block
// is filled with the product formula scaled by the leftover mass s.
inline Coupling build_upper_coupling(const DiscretePMF& pmf1, const DiscretePMF& pmf0,
                                     double delta) {
    const std::size_t m = pmf1.size(), n = pmf0.size();
    std::vector<double> x(m * n, 0.0);
    std::vector<char> row_forced(m, 0), col_forced(n, 0);
    auto cells = frechet_cell_bounds(pmf1, pmf0, delta);
    for (const auto& cell : cells) {
        if (pmf1.probs()[cell.row] <= pmf0.probs()[cell.col]) {
            row_forced[cell.row] = 1;  // whole row mass sits on the matched cell
        } else {
            col_forced[cell.col] = 1;  // whole column mass sits on the matched cell
        }
        x[cell.row * n + cell.col] = cell.upper;
    }
    double s = 1.0;
    for (std::size_t i = 0; i < m; ++i)
        if (row_forced[i]) s -= pmf1.probs()[i];
    for (std::size_t j = 0; j < n; ++j)
        if (col_forced[j]) s -= pmf0.probs()[j];

    if (s > kClampWindow) {
        // Residual margins for free rows/columns, net of the forced matched cell
        // already placed in that row or column.
        std::vector<double> r(m, 0.0), c(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            if (row_forced[i]) continue;
            r[i] = pmf1.probs()[i];
            auto j = pmf0.index_of(pmf1.support()[i] - delta);
            if (j && col_forced[*j]) r[i] -= pmf0.probs()[*j];
            r[i] = std::max(r[i], 0.0);
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (col_forced[j]) continue;
            c[j] = pmf0.probs()[j];
            auto i = pmf1.index_of(pmf0.support()[j] + delta);
            if (i && row_forced[*i]) c[j] -= pmf1.probs()[*i];
            c[j] = std::max(c[j], 0.0);
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (row_forced[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (col_forced[j]) continue;
                x[i * n + j] = r[i] * c[j] / s;
            }
        }
    }
    return Coupling(pmf1.support(), pmf0.support(), std::move(x));
}

namespace detail {

// Explicit construction when exactly one Fréchet lower bound is positive:
// the matched cell carries exactly its lower bound, its row absorbs every
// other column margin and its column every other row margin.
inline Coupling single_positive_lower_coupling(const DiscretePMF& pmf1,
                                               const DiscretePMF& pmf0,
                                               const CellBound& cell) {
    const std::size_t m = pmf1.size(), n = pmf0.size();
    std::vector<double> x(m * n, 0.0);
    x[cell.row * n + cell.col] = cell.lower;
    for (std::size_t j = 0; j < n; ++j) {
        if (j != cell.col) x[cell.row * n + j] = pmf0.probs()[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (i != cell.row) x[i * n + cell.col] = pmf1.probs()[i];
    }
    return Coupling(pmf1.support(), pmf0.support(), std::move(x));
}

}  // namespace detail

// Coupling with P(Y1 = i, Y0 = i - delta) = L_i on every matched cell.
// General case goes through a min-cost transportation solve whose optimum
// must equal sum L_i; divergence is a hard error, not a tolerance issue.
inline Coupling build_lower_coupling(const DiscretePMF& pmf1, const DiscretePMF& pmf0,
                                     double delta) {
    auto cells = frechet_cell_bounds(pmf1, pmf0, delta);
    double lower_sum = 0.0;
    const CellBound* positive = nullptr;
    for (const auto& cell : cells) {
        lower_sum += cell.lower;
        if (cell.lower > 0.0) positive = &cell;
    }
    if (positive) {
        return detail::single_positive_lower_coupling(pmf1, pmf0, *positive);
    }
    TransportInstance inst{pmf1, pmf0, {}};
    for (const auto& cell : cells) inst.objective_cells.emplace_back(cell.row, cell.col);
    ExtremizeResult res =
        extremize_mass(inst, Direction::Min, std::max(pmf1.size(), pmf0.size()));
    if (std::abs(res.value - lower_sum) > tolerance()) {
        throw std::runtime_error("build_lower_coupling: solver optimum differs from "
                                 "the Frechet lower-bound sum");
    }
    return std::move(res.coupling);
}

// Sharp interval for P(Y1 - Y0 = delta), with attaining couplings attached.
inline BoundPair ite_pmf_bounds(const DiscretePMF& pmf1, const DiscretePMF& pmf0,
                                double delta) {
    auto cells = frechet_cell_bounds(pmf1, pmf0, delta);
    double lo = 0.0, hi = 0.0;
    for (const auto& cell : cells) {
        lo += cell.lower;
        hi += cell.upper;
    }
    if (hi > 1.0 + tolerance()) {
        throw std::logic_error("ite_pmf_bounds: upper-bound sum exceeds 1");
    }
    hi = std::min(hi, 1.0);
    return BoundPair(lo, hi, build_lower_coupling(pmf1, pmf0, delta),
                     build_upper_coupling(pmf1, pmf0, delta));
}

// All delta values with at least one matched support pair, ascending.
inline std::vector<double> delta_support(const DiscretePMF& pmf1,
                                         const DiscretePMF& pmf0) {
    std::vector<double> deltas;
    for (double y1 : pmf1.support()) {
        for (double y0 : pmf0.support()) deltas.push_back(y1 - y0);
    }
    std::sort(deltas.begin(), deltas.end());
    std::vector<double> unique;
    for (double d : deltas) {
        if (unique.empty() || d - unique.back() > kValueMatchTol) unique.push_back(d);
    }
    return unique;
}

}  // namespace iteb
