#pragma once

// Dense numeric kernels on a row-stochastic chain matrix P (P(i,j) is the
// probability of moving from i to j). Templated on the scalar so tests can
// cross-check double results against long double.

#include "powermdp/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace powermdp::linalg {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double kResidualBudget = 1e-8;

/// Discounted visit vector f = sum_t gamma^t (P^t)^T e_start, i.e. the
/// solution of (I - gamma P)^T f = e_start.
template <class Scalar>
Vector<Scalar> discounted_visits(const Matrix<Scalar>& chain, Eigen::Index start, Scalar gamma) {
    const auto n = chain.rows();
    const Matrix<Scalar> system = (Matrix<Scalar>::Identity(n, n) - gamma * chain).transpose();
    Vector<Scalar> rhs = Vector<Scalar>::Zero(n);
    rhs(start) = Scalar(1);
    const Vector<Scalar> f = system.partialPivLu().solve(rhs);
    const Scalar residual = (system * f - rhs).template lpNorm<Eigen::Infinity>();
    if (!(residual <= Scalar(kResidualBudget) * std::max<Scalar>(Scalar(1), f.template lpNorm<Eigen::Infinity>())))
        throw NumericFailure("visit distribution solve residual too large");
    return f;
}

/// d f / d gamma for discounted_visits(); solves (I - gamma P)^T g = P^T f.
template <class Scalar>
Vector<Scalar> discounted_visits_derivative(const Matrix<Scalar>& chain, Eigen::Index start, Scalar gamma) {
    const auto n = chain.rows();
    const Vector<Scalar> f = discounted_visits(chain, start, gamma);
    const Matrix<Scalar> system = (Matrix<Scalar>::Identity(n, n) - gamma * chain).transpose();
    return system.partialPivLu().solve(chain.transpose() * f);
}

/// State values V = (I - gamma P)^{-1} r for every start state.
template <class Scalar>
Vector<Scalar> policy_values(const Matrix<Scalar>& chain, const Vector<Scalar>& reward, Scalar gamma) {
    const auto n = chain.rows();
    const Matrix<Scalar> system = Matrix<Scalar>::Identity(n, n) - gamma * chain;
    return system.partialPivLu().solve(reward);
}

/// Tarjan's algorithm over the positive entries of the chain. Components are
/// returned in reverse topological order (sinks first).
template <class Scalar>
std::vector<std::vector<Eigen::Index>> strongly_connected_components(const Matrix<Scalar>& chain) {
    const auto n = chain.rows();
    std::vector<Eigen::Index> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
    std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> stack;
    std::vector<std::vector<Eigen::Index>> components;
    Eigen::Index counter = 0;

    struct Frame {
        Eigen::Index node;
        Eigen::Index next;
    };
    for (Eigen::Index root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] >= 0) continue;
        std::vector<Frame> frames{{root, 0}};
        index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
        stack.push_back(root);
        on_stack[static_cast<std::size_t>(root)] = true;
        while (!frames.empty()) {
            auto& fr = frames.back();
            const auto v = fr.node;
            if (fr.next < n) {
                const auto w = fr.next++;
                if (!(chain(v, w) > Scalar(0))) continue;
                const auto wi = static_cast<std::size_t>(w);
                if (index[wi] < 0) {
                    index[wi] = low[wi] = counter++;
                    stack.push_back(w);
                    on_stack[wi] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[wi]) {
                    low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], index[wi]);
                }
                continue;
            }
            const auto vi = static_cast<std::size_t>(v);
            if (low[vi] == index[vi]) {
                std::vector<Eigen::Index> comp;
                Eigen::Index w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[static_cast<std::size_t>(w)] = false;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                components.push_back(std::move(comp));
            }
            frames.pop_back();
            if (!frames.empty()) {
                const auto parent = static_cast<std::size_t>(frames.back().node);
                low[parent] = std::min(low[parent], low[vi]);
            }
        }
    }
    return components;
}

/// Row `start` of the Cesaro limit matrix lim (1/T) sum_t P^t.
///
/// Closed classes are the sink components of the condensation. Each gets its
/// stationary distribution from a direct solve; absorption probabilities
/// from the transient states into each class come from (I - Q) h = b.
template <class Scalar>
Vector<Scalar> cesaro_row(const Matrix<Scalar>& chain, Eigen::Index start) {
    const auto n = chain.rows();
    const auto comps = strongly_connected_components(chain);

    std::vector<long> comp_of(static_cast<std::size_t>(n), -1);
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (auto v : comps[c]) comp_of[static_cast<std::size_t>(v)] = static_cast<long>(c);

    std::vector<bool> closed(comps.size(), true);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (chain(i, j) > Scalar(0) && comp_of[static_cast<std::size_t>(i)] != comp_of[static_cast<std::size_t>(j)])
                closed[static_cast<std::size_t>(comp_of[static_cast<std::size_t>(i)])] = false;

    std::vector<Eigen::Index> transient;
    std::vector<Eigen::Index> transient_pos(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!closed[static_cast<std::size_t>(comp_of[static_cast<std::size_t>(i)])]) {
            transient_pos[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(transient.size());
            transient.push_back(i);
        }
    }
    const auto nt = static_cast<Eigen::Index>(transient.size());
    Eigen::PartialPivLU<Matrix<Scalar>> transient_lu;
    if (nt > 0) {
        Matrix<Scalar> iq = Matrix<Scalar>::Identity(nt, nt);
        for (Eigen::Index a = 0; a < nt; ++a)
            for (Eigen::Index b = 0; b < nt; ++b) iq(a, b) -= chain(transient[a], transient[b]);
        transient_lu.compute(iq);
    }

    Vector<Scalar> out = Vector<Scalar>::Zero(n);
    const Scalar budget = Scalar(kResidualBudget);
    for (std::size_t c = 0; c < comps.size(); ++c) {
        if (!closed[c]) continue;
        const auto& cls = comps[c];
        const auto k = static_cast<Eigen::Index>(cls.size());

        // Probability of ending in this class when starting at `start`.
        Scalar weight;
        if (comp_of[static_cast<std::size_t>(start)] == static_cast<long>(c)) {
            weight = Scalar(1);
        } else if (transient_pos[static_cast<std::size_t>(start)] < 0) {
            continue;
        } else {
            Vector<Scalar> b = Vector<Scalar>::Zero(nt);
            for (Eigen::Index a = 0; a < nt; ++a)
                for (auto v : cls) b(a) += chain(transient[a], v);
            const Vector<Scalar> h = transient_lu.solve(b);
            weight = h(transient_pos[static_cast<std::size_t>(start)]);
        }
        if (weight <= Scalar(0)) continue;

        // Stationary distribution: pi (P_C - I) = 0 with sum(pi) = 1.
        Matrix<Scalar> system(k + 1, k);
        for (Eigen::Index a = 0; a < k; ++a)
            for (Eigen::Index b = 0; b < k; ++b) system(b, a) = chain(cls[a], cls[b]) - (a == b ? Scalar(1) : Scalar(0));
        system.row(k).setOnes();
        Vector<Scalar> rhs = Vector<Scalar>::Zero(k + 1);
        rhs(k) = Scalar(1);
        const Vector<Scalar> pi = system.colPivHouseholderQr().solve(rhs);
        if (!((system * pi - rhs).template lpNorm<Eigen::Infinity>() <= budget))
            throw NumericFailure("stationary distribution solve residual too large");
        for (Eigen::Index a = 0; a < k; ++a) out(cls[a]) += weight * pi(a);
    }
    if (!(std::abs(out.sum() - Scalar(1)) <= budget))
        throw NumericFailure("Cesaro row does not sum to one");
    return out;
}

} // namespace powermdp::linalg
