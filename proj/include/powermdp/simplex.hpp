#pragma once

// Dense two-phase tableau simplex with Bland's rule.
//
//   maximize c^T x  subject to  A x (<=|>=|=) b,  x >= 0
//
// Intended for desk-scale problems (a few hundred rows and columns).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace powermdp::lp {

enum class Sense { less_equal, greater_equal, equal };
enum class Status { optimal, infeasible, unbounded, iteration_limit };

template <class Scalar>
struct Problem {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b;
    std::vector<Sense> sense;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c;
};

template <class Scalar>
struct Solution {
    Status status = Status::iteration_limit;
    Scalar objective = Scalar(0);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
    std::size_t pivots = 0;
};

namespace detail {

template <class Scalar>
class Tableau {
public:
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Mat::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

    Scalar& at(Eigen::Index i, Eigen::Index j) { return t_(i, j); }
    Scalar at(Eigen::Index i, Eigen::Index j) const { return t_(i, j); }
    Scalar& rhs(Eigen::Index i) { return t_(i, t_.cols() - 1); }
    Scalar& cost(Eigen::Index j) { return t_(t_.rows() - 1, j); }
    Scalar& neg_objective() { return t_(t_.rows() - 1, t_.cols() - 1); }

    Eigen::Index rows() const { return t_.rows() - 1; }
    Eigen::Index cols() const { return t_.cols() - 1; }
    std::vector<Eigen::Index>& basis() { return basis_; }

    void pivot(Eigen::Index r, Eigen::Index c) {
        t_.row(r) /= t_(r, c);
        for (Eigen::Index i = 0; i < t_.rows(); ++i) {
            if (i == r) continue;
            const Scalar f = t_(i, c);
            if (f != Scalar(0)) t_.row(i) -= f * t_.row(r);
        }
        basis_[static_cast<std::size_t>(r)] = c;
    }

    // Bland's rule: lowest-index improving column, ratio ties to the lowest
    // basic variable index. `allowed` masks columns that may enter.
    Status optimize(const std::vector<bool>& allowed, Scalar eps, std::size_t max_pivots, std::size_t& pivots) {
        while (pivots < max_pivots) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < cols(); ++j) {
                if (allowed[static_cast<std::size_t>(j)] && cost(j) > eps) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return Status::optimal;
            Eigen::Index leave = -1;
            Scalar best = std::numeric_limits<Scalar>::infinity();
            for (Eigen::Index i = 0; i < rows(); ++i) {
                if (basis_[static_cast<std::size_t>(i)] < 0) continue;
                const Scalar a = t_(i, enter);
                if (a <= eps) continue;
                const Scalar ratio = rhs(i) / a;
                if (ratio < best - eps ||
                    (ratio <= best + eps && leave >= 0 &&
                     basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
                    best = std::min(best, ratio);
                    leave = i;
                }
            }
            if (leave < 0) return Status::unbounded;
            pivot(leave, enter);
            ++pivots;
        }
        return Status::iteration_limit;
    }

private:
    Mat t_;
    std::vector<Eigen::Index> basis_;
};

} // namespace detail

template <class Scalar>
Solution<Scalar> solve(const Problem<Scalar>& p, std::size_t max_pivots = 100000) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index m = p.A.rows();
    const Eigen::Index n = p.A.cols();
    const Scalar eps = Scalar(1e-11) * std::max<Scalar>(Scalar(1), p.A.cwiseAbs().maxCoeff());

    // Normalize to b >= 0, then count slack/surplus and artificial columns.
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A = p.A;
    Vec b = p.b;
    std::vector<Sense> sense = p.sense;
    Eigen::Index n_slack = 0, n_art = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        auto& s = sense[static_cast<std::size_t>(i)];
        if (b(i) < Scalar(0)) {
            A.row(i) *= Scalar(-1);
            b(i) = -b(i);
            if (s == Sense::less_equal) s = Sense::greater_equal;
            else if (s == Sense::greater_equal) s = Sense::less_equal;
        }
        if (s != Sense::equal) ++n_slack;
        if (s != Sense::less_equal) ++n_art;
    }

    const Eigen::Index art0 = n + n_slack;
    detail::Tableau<Scalar> tab(m, art0 + n_art);
    Eigen::Index slack = n, art = art0;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) tab.at(i, j) = A(i, j);
        tab.rhs(i) = b(i);
        switch (sense[static_cast<std::size_t>(i)]) {
        case Sense::less_equal:
            tab.at(i, slack) = Scalar(1);
            tab.basis()[static_cast<std::size_t>(i)] = slack++;
            break;
        case Sense::greater_equal:
            tab.at(i, slack++) = Scalar(-1);
            [[fallthrough]];
        case Sense::equal:
            tab.at(i, art) = Scalar(1);
            tab.basis()[static_cast<std::size_t>(i)] = art++;
            break;
        }
    }

    Solution<Scalar> out;
    std::vector<bool> allowed(static_cast<std::size_t>(tab.cols()), true);

    if (n_art > 0) {
        // Phase 1: maximize -(sum of artificials).
        for (Eigen::Index i = 0; i < m; ++i) {
            if (tab.basis()[static_cast<std::size_t>(i)] < art0) continue;
            for (Eigen::Index j = 0; j < art0; ++j) tab.cost(j) += tab.at(i, j);
            tab.neg_objective() += tab.rhs(i);
        }
        const auto st = tab.optimize(allowed, eps, max_pivots, out.pivots);
        if (st == Status::iteration_limit) return out;
        if (tab.neg_objective() > Scalar(1e-9) * std::max<Scalar>(Scalar(1), b.cwiseAbs().maxCoeff())) {
            out.status = Status::infeasible;
            return out;
        }
        // Drive remaining artificials out; rows where that is impossible are redundant.
        for (Eigen::Index i = 0; i < m; ++i) {
            if (tab.basis()[static_cast<std::size_t>(i)] < art0) continue;
            Eigen::Index col = -1;
            for (Eigen::Index j = 0; j < art0 && col < 0; ++j)
                if (std::abs(tab.at(i, j)) > eps) col = j;
            if (col >= 0) tab.pivot(i, col);
            else tab.basis()[static_cast<std::size_t>(i)] = -1;
        }
        for (Eigen::Index j = art0; j < tab.cols(); ++j) allowed[static_cast<std::size_t>(j)] = false;
    }

    // Phase 2 reduced costs for the true objective.
    for (Eigen::Index j = 0; j <= tab.cols(); ++j) tab.cost(j) = Scalar(0);
    for (Eigen::Index j = 0; j < n; ++j) tab.cost(j) = p.c(j);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto bj = tab.basis()[static_cast<std::size_t>(i)];
        if (bj < 0 || bj >= n) continue;
        const Scalar cb = p.c(bj);
        if (cb == Scalar(0)) continue;
        for (Eigen::Index j = 0; j < tab.cols(); ++j) tab.cost(j) -= cb * tab.at(i, j);
        tab.neg_objective() -= cb * tab.rhs(i);
    }
    out.status = tab.optimize(allowed, eps, max_pivots, out.pivots);
    if (out.status != Status::optimal) return out;

    out.x = Vec::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto bj = tab.basis()[static_cast<std::size_t>(i)];
        if (bj >= 0 && bj < n) out.x(bj) = tab.rhs(i);
    }
    out.objective = p.c.dot(out.x);
    return out;
}

} // namespace powermdp::lp
