#pragma once

// Ground-truth extremization of linear functionals of the joint distribution
// over the transportation polytope with fixed margins. Backend is a primal
// transportation simplex on the bipartite structure; degenerate pivots are
// broken by Bland's rule so the solve always terminates. An exhaustive
// vertex-enumeration routine for tiny instances serves as an oracle for the
// oracle in tests.

#include <cstdint>
#include <functional>
#include <limits>
#include <queue>

#include "itebounds/core.hpp"

namespace iteb {

enum class Direction { Min, Max };

struct TransportInstance {
    DiscretePMF row_margin;  // Y1
    DiscretePMF col_margin;  // Y0
    // Index pairs (row, col) whose total mass is the objective.
    std::vector<std::pair<std::size_t, std::size_t>> objective_cells;
};

struct ExtremizeResult {
    double value = 0.0;
    Coupling coupling;
    double rescale_deviation = 0.0;  // |1 - original margin sum|, when > tolerance
};

namespace detail {

// Minimize sum c_ij x_ij subject to row sums a and column sums b.
// Costs are small integers here, so dual values and reduced costs stay exact.
class TransportSimplex {
public:
    TransportSimplex(std::vector<double> a, std::vector<double> b,
                     std::vector<double> cost)
        : m_(a.size()), n_(b.size()), a_(std::move(a)), b_(std::move(b)),
          cost_(std::move(cost)), x_(m_ * n_, 0.0), basic_(m_ * n_, false) {}

    std::vector<double> solve() {
        northwest_corner();
        const std::size_t max_iters = 200000;
        for (std::size_t iter = 0; iter < max_iters; ++iter) {
            compute_duals();
            std::size_t enter = entering_cell();
            if (enter == npos) return x_;
            pivot(enter);
        }
        throw std::runtime_error("transport simplex: iteration limit reached");
    }

private:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    std::size_t idx(std::size_t i, std::size_t j) const { return i * n_ + j; }

    void northwest_corner() {
        std::vector<double> ra = a_, cb = b_;
        std::size_t i = 0, j = 0;
        while (true) {
            double q = std::min(ra[i], cb[j]);
            x_[idx(i, j)] = q;
            basic_[idx(i, j)] = true;
            basis_.push_back(idx(i, j));
            ra[i] -= q;
            cb[j] -= q;
            if (i == m_ - 1 && j == n_ - 1) break;
            if (ra[i] <= 0.0 && i < m_ - 1) {
                ++i;
            } else if (j < n_ - 1) {
                ++j;
            } else {
                ++i;
            }
        }
    }

    // Duals from the basis tree: u_i + v_j = c_ij on basic cells.
    void compute_duals() {
        u_.assign(m_, 0.0);
        v_.assign(n_, 0.0);
        std::vector<char> seen_row(m_, 0), seen_col(n_, 0);
        // adjacency over tree nodes: rows 0..m-1, cols m..m+n-1
        std::vector<std::vector<std::size_t>> adj(m_ + n_);
        for (std::size_t cell : basis_) {
            std::size_t i = cell / n_, j = cell % n_;
            adj[i].push_back(m_ + j);
            adj[m_ + j].push_back(i);
        }
        std::queue<std::size_t> q;
        q.push(0);
        seen_row[0] = 1;
        while (!q.empty()) {
            std::size_t node = q.front();
            q.pop();
            for (std::size_t nb : adj[node]) {
                bool nb_is_col = nb >= m_;
                if (nb_is_col ? seen_col[nb - m_] : seen_row[nb]) continue;
                if (nb_is_col) {
                    seen_col[nb - m_] = 1;
                    std::size_t i = node, j = nb - m_;
                    v_[j] = cost_[idx(i, j)] - u_[i];
                } else {
                    seen_row[nb] = 1;
                    std::size_t i = nb, j = node - m_;
                    u_[i] = cost_[idx(i, j)] - v_[j];
                }
                q.push(nb);
            }
        }
    }

    // Bland: first (row-major) nonbasic cell with negative reduced cost.
    std::size_t entering_cell() const {
        for (std::size_t cell = 0; cell < m_ * n_; ++cell) {
            if (basic_[cell]) continue;
            std::size_t i = cell / n_, j = cell % n_;
            if (cost_[cell] - u_[i] - v_[j] < -0.5) return cell;
        }
        return npos;
    }

    void pivot(std::size_t enter) {
        std::size_t ei = enter / n_, ej = enter % n_;
        // Path in the basis tree from row ei to column ej.
        std::vector<std::vector<std::size_t>> adj(m_ + n_);
        for (std::size_t cell : basis_) {
            std::size_t i = cell / n_, j = cell % n_;
            adj[i].push_back(m_ + j);
            adj[m_ + j].push_back(i);
        }
        std::vector<std::size_t> parent(m_ + n_, npos);
        std::vector<char> seen(m_ + n_, 0);
        std::queue<std::size_t> q;
        q.push(ei);
        seen[ei] = 1;
        while (!q.empty()) {
            std::size_t node = q.front();
            q.pop();
            if (node == m_ + ej) break;
            for (std::size_t nb : adj[node]) {
                if (!seen[nb]) {
                    seen[nb] = 1;
                    parent[nb] = node;
                    q.push(nb);
                }
            }
        }
        if (!seen[m_ + ej]) throw std::runtime_error("transport simplex: basis not a tree");
        // Cycle cells: entering cell (+), then alternating along the path.
        std::vector<std::size_t> cycle{enter};
        std::size_t node = m_ + ej;
        while (node != ei) {
            std::size_t p = parent[node];
            std::size_t i = (node < m_) ? node : p;
            std::size_t j = (node < m_) ? p - m_ : node - m_;
            cycle.push_back(idx(i, j));
            node = p;
        }
        // Odd positions in `cycle` lose theta.
        double theta = std::numeric_limits<double>::infinity();
        std::size_t leave = npos;
        for (std::size_t k = 1; k < cycle.size(); k += 2) {
            double alloc = x_[cycle[k]];
            if (alloc < theta - 1e-15 ||
                (std::abs(alloc - theta) <= 1e-15 && (leave == npos || cycle[k] < leave))) {
                theta = alloc;
                leave = cycle[k];
            }
        }
        for (std::size_t k = 0; k < cycle.size(); ++k) {
            if (k % 2 == 0) {
                x_[cycle[k]] += theta;
            } else {
                x_[cycle[k]] -= theta;
            }
        }
        x_[leave] = 0.0;
        basic_[leave] = false;
        basic_[enter] = true;
        for (auto& cell : basis_) {
            if (cell == leave) {
                cell = enter;
                break;
            }
        }
    }

    std::size_t m_, n_;
    std::vector<double> a_, b_, cost_;
    std::vector<double> x_;
    std::vector<char> basic_;
    std::vector<std::size_t> basis_;
    std::vector<double> u_, v_;
};

}  // namespace detail

// Exact optimum of the objective-cell mass over all couplings with the given
// margins, plus an attaining coupling.
inline ExtremizeResult extremize_mass(const TransportInstance& inst, Direction dir,
                                      std::size_t size_guard = 20) {
    const auto& row = inst.row_margin;
    const auto& col = inst.col_margin;
    if (row.size() > size_guard || col.size() > size_guard) {
        throw std::domain_error("extremize_mass: support size guard exceeded");
    }
    for (const auto& [i, j] : inst.objective_cells) {
        if (i >= row.size() || j >= col.size()) {
            throw std::invalid_argument("extremize_mass: objective cell out of range");
        }
    }
    // Rescale margins to sum exactly to 1.
    double sa = 0.0, sb = 0.0;
    for (double p : row.probs()) sa += p;
    for (double p : col.probs()) sb += p;
    std::vector<double> a(row.probs()), b(col.probs());
    for (double& p : a) p /= sa;
    for (double& p : b) p /= sb;
    double rescale = std::max(std::abs(1.0 - sa), std::abs(1.0 - sb));

    std::vector<double> cost(row.size() * col.size(), 0.0);
    const double unit = (dir == Direction::Min) ? 1.0 : -1.0;
    for (const auto& [i, j] : inst.objective_cells) cost[i * col.size() + j] = unit;

    detail::TransportSimplex solver(a, b, cost);
    std::vector<double> x = solver.solve();

    double value = 0.0;
    for (const auto& [i, j] : inst.objective_cells) value += x[i * col.size() + j];

    ExtremizeResult res{std::clamp(value, 0.0, 1.0),
                        Coupling(row.support(), col.support(), std::move(x)),
                        rescale > tolerance() ? rescale : 0.0};
    return res;
}

// Exhaustive enumeration of transportation-polytope vertices for tiny
// instances (m*n <= 16); used in tests to cross-check the simplex backend.
inline ExtremizeResult extremize_mass_exhaustive(const TransportInstance& inst,
                                                 Direction dir) {
    const std::size_t m = inst.row_margin.size(), n = inst.col_margin.size();
    if (m * n > 16) {
        throw std::domain_error("extremize_mass_exhaustive: instance too large");
    }
    double sa = 0.0, sb = 0.0;
    for (double p : inst.row_margin.probs()) sa += p;
    for (double p : inst.col_margin.probs()) sb += p;
    std::vector<double> a(inst.row_margin.probs()), b(inst.col_margin.probs());
    for (double& p : a) p /= sa;
    for (double& p : b) p /= sb;

    const std::size_t cells = m * n;
    const std::size_t basis_size = m + n - 1;
    double best = (dir == Direction::Min) ? std::numeric_limits<double>::infinity()
                                          : -std::numeric_limits<double>::infinity();
    std::vector<double> best_x;

    // Iterate over all cell subsets of size m+n-1.
    std::vector<std::size_t> pick(basis_size);
    for (std::size_t k = 0; k < basis_size; ++k) pick[k] = k;
    auto advance = [&]() -> bool {
        std::size_t k = basis_size;
        while (k-- > 0) {
            if (pick[k] + (basis_size - k) < cells + 0) {
                ++pick[k];
                for (std::size_t l = k + 1; l < basis_size; ++l) pick[l] = pick[l - 1] + 1;
                return true;
            }
        }
        return false;
    };

    do {
        // Solve the margins on the chosen cells by leaf stripping; a unique
        // nonnegative solution exists exactly when the cells form a spanning tree.
        std::vector<double> ra = a, cb = b;
        std::vector<int> row_deg(m, 0), col_deg(n, 0);
        for (std::size_t cell : pick) {
            ++row_deg[cell / n];
            ++col_deg[cell % n];
        }
        std::vector<double> x(cells, 0.0);
        std::vector<char> done(basis_size, 0);
        bool feasible = true;
        for (std::size_t solved = 0; solved < basis_size && feasible;) {
            bool progressed = false;
            for (std::size_t k = 0; k < basis_size; ++k) {
                if (done[k]) continue;
                std::size_t i = pick[k] / n, j = pick[k] % n;
                if (row_deg[i] == 1) {
                    x[pick[k]] = ra[i];
                    cb[j] -= ra[i];
                    ra[i] = 0.0;
                } else if (col_deg[j] == 1) {
                    x[pick[k]] = cb[j];
                    ra[i] -= cb[j];
                    cb[j] = 0.0;
                } else {
                    continue;
                }
                --row_deg[i];
                --col_deg[j];
                done[k] = 1;
                ++solved;
                progressed = true;
            }
            if (!progressed) feasible = false;  // cycle: not a tree
        }
        if (!feasible) continue;
        for (double xv : x) {
            if (xv < -1e-9) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        double value = 0.0;
        for (const auto& [i, j] : inst.objective_cells) value += x[i * n + j];
        if ((dir == Direction::Min && value < best) ||
            (dir == Direction::Max && value > best)) {
            best = value;
            best_x = x;
            for (double& xv : best_x) xv = std::max(xv, 0.0);
        }
    } while (advance());

    if (best_x.empty()) throw std::runtime_error("vertex enumeration found no basis");
    return ExtremizeResult{std::clamp(best, 0.0, 1.0),
                           Coupling(inst.row_margin.support(), inst.col_margin.support(),
                                    std::move(best_x)),
                           0.0};
}

// Min and max over all couplings of P(Y1 - Y0 in event), with certificates.
inline BoundPair worst_case_event_probability(
    const DiscretePMF& pmf1, const DiscretePMF& pmf0,
    const std::function<bool(double)>& event, std::size_t size_guard = 20) {
    TransportInstance inst{pmf1, pmf0, {}};
    for (std::size_t i = 0; i < pmf1.size(); ++i) {
        for (std::size_t j = 0; j < pmf0.size(); ++j) {
            if (event(pmf1.support()[i] - pmf0.support()[j])) {
                inst.objective_cells.emplace_back(i, j);
            }
        }
    }
    ExtremizeResult lo = extremize_mass(inst, Direction::Min, size_guard);
    ExtremizeResult hi = extremize_mass(inst, Direction::Max, size_guard);
    return BoundPair(lo.value, hi.value, std::move(lo.coupling), std::move(hi.coupling));
}

inline BoundPair worst_case_delta_probability(const DiscretePMF& pmf1,
                                              const DiscretePMF& pmf0, double delta,
                                              std::size_t size_guard = 20) {
    return worst_case_event_probability(
        pmf1, pmf0,
        [&](double d) { return std::abs(d - delta) <= kValueMatchTol; }, size_guard);
}

inline BoundPair worst_case_interval_probability(const DiscretePMF& pmf1,
                                                 const DiscretePMF& pmf0, double lo,
                                                 double hi,
                                                 std::size_t size_guard = 20) {
    return worst_case_event_probability(
        pmf1, pmf0,
        [&](double d) { return d >= lo - kValueMatchTol && d <= hi + kValueMatchTol; },
        size_guard);
}

}  // namespace iteb
