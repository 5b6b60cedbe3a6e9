#pragma once

// Core domain types shared by the whole library: probabilities, finite-support
// pmfs, step cdfs, couplings and bound intervals. All types are immutable
// after construction and every operation is a pure function.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace iteb {

// Construction clamps violations up to this window; anything larger throws.
inline constexpr double kClampWindow = 1e-12;

// Support values closer than this are considered the same outcome.
inline constexpr double kValueMatchTol = 1e-9;

// Global absolute tolerance for probability comparisons. Overridable
// (e.g. via the ITE_BOUNDS_TOLERANCE env var in the CLI).
inline double& tolerance() {
    static double tol = 1e-9;
    return tol;
}

class Probability {
public:
    explicit Probability(double v) {
        if (v < -kClampWindow || v > 1.0 + kClampWindow) {
            std::ostringstream os;
            os << "probability out of range: " << v;
            throw std::domain_error(os.str());
        }
        v_ = std::clamp(v, 0.0, 1.0);
    }
    double value() const noexcept { return v_; }
    operator double() const noexcept { return v_; }

private:
    double v_;
};

// Miscoverage level, restricted to the open interval (0, 0.5).
class Alpha {
public:
    explicit Alpha(double v) {
        if (!(v > 0.0 && v < 0.5)) {
            std::ostringstream os;
            os << "alpha must lie in (0, 0.5), got " << v;
            throw std::domain_error(os.str());
        }
        v_ = v;
    }
    double value() const noexcept { return v_; }
    operator double() const noexcept { return v_; }

private:
    double v_;
};

class StepCDF;

// Finite-support pmf. Support is strictly increasing; zero-mass points are
// dropped on construction so downstream cell formulas never see them.
class DiscretePMF {
public:
    DiscretePMF(std::vector<double> support, std::vector<double> probs) {
        if (support.size() != probs.size()) {
            throw std::invalid_argument("pmf: support/probs length mismatch");
        }
        if (support.empty()) {
            throw std::invalid_argument("pmf: empty support");
        }
        double sum = 0.0;
        for (std::size_t k = 0; k < support.size(); ++k) {
            if (k > 0 && !(support[k] > support[k - 1])) {
                throw std::invalid_argument("pmf: support not strictly increasing");
            }
            if (probs[k] < -kClampWindow) {
                throw std::domain_error("pmf: negative probability");
            }
            sum += std::max(probs[k], 0.0);
        }
        if (std::abs(sum - 1.0) > tolerance()) {
            std::ostringstream os;
            os << "pmf: probabilities sum to " << sum << ", expected 1";
            throw std::domain_error(os.str());
        }
        for (std::size_t k = 0; k < support.size(); ++k) {
            if (probs[k] > 0.0) {
                support_.push_back(support[k]);
                probs_.push_back(probs[k]);
            }
        }
        if (support_.empty()) {
            throw std::domain_error("pmf: all mass dropped");
        }
    }

    static DiscretePMF point_mass(double value) { return DiscretePMF({value}, {1.0}); }

    std::size_t size() const noexcept { return support_.size(); }
    const std::vector<double>& support() const noexcept { return support_; }
    const std::vector<double>& probs() const noexcept { return probs_; }

    // Index of the support point matching `value` within kValueMatchTol.
    std::optional<std::size_t> index_of(double value) const {
        auto it = std::lower_bound(support_.begin(), support_.end(), value - kValueMatchTol);
        if (it != support_.end() && std::abs(*it - value) <= kValueMatchTol) {
            return static_cast<std::size_t>(it - support_.begin());
        }
        return std::nullopt;
    }

    double prob_at(double value) const {
        auto idx = index_of(value);
        return idx ? probs_[*idx] : 0.0;
    }

    StepCDF to_cdf() const;

private:
    std::vector<double> support_;
    std::vector<double> probs_;
};

// Right-continuous step cdf with finitely many jumps, ending at 1.
class StepCDF {
public:
    StepCDF(std::vector<double> jump_points, std::vector<double> cdf_values)
        : points_(std::move(jump_points)), values_(std::move(cdf_values)) {
        if (points_.size() != values_.size() || points_.empty()) {
            throw std::invalid_argument("cdf: bad jump point / value lists");
        }
        double prev = 0.0;
        for (std::size_t k = 0; k < points_.size(); ++k) {
            if (k > 0 && !(points_[k] > points_[k - 1])) {
                throw std::invalid_argument("cdf: jump points not strictly increasing");
            }
            if (values_[k] < prev - kClampWindow || values_[k] > 1.0 + kClampWindow) {
                throw std::domain_error("cdf: values not nondecreasing in [0,1]");
            }
            prev = values_[k];
        }
        if (std::abs(values_.back() - 1.0) > tolerance()) {
            throw std::domain_error("cdf: final value must be 1");
        }
    }

    const std::vector<double>& jump_points() const noexcept { return points_; }
    const std::vector<double>& cdf_values() const noexcept { return values_; }

    // F(y), right-continuous.
    double at(double y) const {
        auto it = std::upper_bound(points_.begin(), points_.end(), y + kValueMatchTol);
        if (it == points_.begin()) return 0.0;
        return values_[static_cast<std::size_t>(it - points_.begin()) - 1];
    }

    // F(y-) = P(Y < y), computed from stored jump masses, never by
    // epsilon-subtraction on floating values.
    double left_limit(double y) const {
        auto it = std::lower_bound(points_.begin(), points_.end(), y - kValueMatchTol);
        if (it == points_.begin()) return 0.0;
        return values_[static_cast<std::size_t>(it - points_.begin()) - 1];
    }

    double mass_at(double y) const { return at(y) - left_limit(y); }

    DiscretePMF to_pmf() const {
        std::vector<double> probs(values_.size());
        double prev = 0.0;
        for (std::size_t k = 0; k < values_.size(); ++k) {
            probs[k] = values_[k] - prev;
            prev = values_[k];
        }
        return DiscretePMF(points_, probs);
    }

private:
    std::vector<double> points_;
    std::vector<double> values_;
};

inline StepCDF DiscretePMF::to_cdf() const {
    std::vector<double> values(probs_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) {
        acc += probs_[k];
        values[k] = std::min(acc, 1.0);
    }
    return StepCDF(support_, values);
}

// Joint pmf matrix over (Y1, Y0) support pairs. Rows index Y1, columns Y0.
class Coupling {
public:
    Coupling(std::vector<double> row_support, std::vector<double> col_support,
             std::vector<double> mass_row_major)
        : rows_(std::move(row_support)), cols_(std::move(col_support)),
          mass_(std::move(mass_row_major)) {
        if (mass_.size() != rows_.size() * cols_.size()) {
            throw std::invalid_argument("coupling: mass matrix shape mismatch");
        }
        double total = 0.0;
        for (double m : mass_) {
            if (m < -tolerance()) throw std::domain_error("coupling: negative mass");
            total += m;
        }
        if (std::abs(total - 1.0) > tolerance()) {
            throw std::domain_error("coupling: total mass not 1");
        }
    }

    std::size_t n_rows() const noexcept { return rows_.size(); }
    std::size_t n_cols() const noexcept { return cols_.size(); }
    const std::vector<double>& row_support() const noexcept { return rows_; }
    const std::vector<double>& col_support() const noexcept { return cols_; }
    double at(std::size_t r, std::size_t c) const { return mass_[r * cols_.size() + c]; }

    double row_sum(std::size_t r) const {
        double s = 0.0;
        for (std::size_t c = 0; c < cols_.size(); ++c) s += at(r, c);
        return s;
    }
    double col_sum(std::size_t c) const {
        double s = 0.0;
        for (std::size_t r = 0; r < rows_.size(); ++r) s += at(r, c);
        return s;
    }

    // Total mass on cells whose (y1, y0) pair satisfies the predicate.
    template <typename Pred>
    double mass_where(Pred&& pred) const {
        double s = 0.0;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            for (std::size_t c = 0; c < cols_.size(); ++c) {
                if (pred(rows_[r], cols_[c])) s += at(r, c);
            }
        }
        return s;
    }

    // Mass on the shifted diagonal y1 - y0 = delta.
    double delta_mass(double delta) const {
        return mass_where([&](double y1, double y0) {
            return std::abs((y1 - y0) - delta) <= kValueMatchTol;
        });
    }

private:
    std::vector<double> rows_;
    std::vector<double> cols_;
    std::vector<double> mass_;
};

struct MarginReport {
    bool ok = false;
    double max_deviation = 0.0;
};

// Checks that the coupling reproduces the declared margins. Support mismatch
// is a structural error, distinct from a margin-deviation failure.
inline MarginReport verify_coupling(const Coupling& c, const DiscretePMF& pmf1,
                                    const DiscretePMF& pmf0) {
    if (c.n_rows() != pmf1.size() || c.n_cols() != pmf0.size()) {
        throw std::invalid_argument("verify_coupling: support dimension mismatch");
    }
    for (std::size_t r = 0; r < c.n_rows(); ++r) {
        if (std::abs(c.row_support()[r] - pmf1.support()[r]) > kValueMatchTol) {
            throw std::invalid_argument("verify_coupling: row support mismatch");
        }
    }
    for (std::size_t k = 0; k < c.n_cols(); ++k) {
        if (std::abs(c.col_support()[k] - pmf0.support()[k]) > kValueMatchTol) {
            throw std::invalid_argument("verify_coupling: column support mismatch");
        }
    }
    MarginReport report;
    for (std::size_t r = 0; r < c.n_rows(); ++r) {
        report.max_deviation =
            std::max(report.max_deviation, std::abs(c.row_sum(r) - pmf1.probs()[r]));
    }
    for (std::size_t k = 0; k < c.n_cols(); ++k) {
        report.max_deviation =
            std::max(report.max_deviation, std::abs(c.col_sum(k) - pmf0.probs()[k]));
    }
    report.ok = report.max_deviation <= tolerance();
    return report;
}

// Closed interval [lower, upper] attached to a probability statement, with
// optional couplings certifying attainment of each endpoint.
struct BoundPair {
    double lower = 0.0;
    double upper = 1.0;
    std::optional<Coupling> lower_certificate;
    std::optional<Coupling> upper_certificate;

    BoundPair() = default;
    BoundPair(double lo, double hi, std::optional<Coupling> lo_cert = std::nullopt,
              std::optional<Coupling> hi_cert = std::nullopt)
        : lower(lo), upper(hi), lower_certificate(std::move(lo_cert)),
          upper_certificate(std::move(hi_cert)) {
        if (lower > upper + kClampWindow) {
            throw std::domain_error("bound pair: lower exceeds upper");
        }
        lower = std::clamp(lower, 0.0, 1.0);
        upper = std::clamp(upper, 0.0, 1.0);
        if (lower > upper) lower = upper;
    }
};

}  // namespace iteb
