#include "powermdp/shifts.hpp"

#include "powermdp/errors.hpp"
#include "powermdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace powermdp {

namespace {

// Functions whose value curves gamma -> f(gamma)^T R coincide. Agreement at
// the probe points is identity: the difference of two such curves is a
// rational function with fewer roots than there are probes.
struct ValueClasses {
    std::vector<std::vector<std::size_t>> members;
    std::vector<std::size_t> rep;

    std::size_t size() const { return rep.size(); }
};

ValueClasses value_classes(const std::vector<VisitDistFn>& fs, const Eigen::VectorXd& reward) {
    ValueClasses out;
    if (fs.empty()) return out;
    Eigen::MatrixXd vals(static_cast<Eigen::Index>(fs.size()), fs.front().probe_values().cols());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (reward.size() != static_cast<Eigen::Index>(fs[i].num_states()))
            throw InvalidArgument("reward vector length does not match the state count");
        vals.row(static_cast<Eigen::Index>(i)) = fs[i].probe_values().transpose() * reward;
    }
    const double tol = kShiftTieTolerance * std::max(1.0, vals.cwiseAbs().maxCoeff());
    std::vector<std::size_t> order(fs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        return vals(static_cast<Eigen::Index>(a), 0) < vals(static_cast<Eigen::Index>(b), 0);
    });
    std::vector<std::size_t> open;  // classes whose first-probe value is within tol of the sweep
    for (auto i : order) {
        const auto ri = vals.row(static_cast<Eigen::Index>(i));
        open.erase(std::remove_if(open.begin(), open.end(),
                                  [&](std::size_t c) {
                                      return ri(0) - vals(static_cast<Eigen::Index>(out.rep[c]), 0) > tol;
                                  }),
                   open.end());
        bool placed = false;
        for (auto c : open) {
            if ((vals.row(static_cast<Eigen::Index>(out.rep[c])) - ri).cwiseAbs().maxCoeff() <= tol) {
                out.members[c].push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) {
            open.push_back(out.rep.size());
            out.rep.push_back(i);
            out.members.push_back({i});
        }
    }
    // Deterministic class order: by smallest member.
    std::vector<std::size_t> perm(out.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (auto& m : out.members) std::sort(m.begin(), m.end());
    std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return out.members[a].front() < out.members[b].front(); });
    ValueClasses sorted;
    for (auto p : perm) {
        sorted.members.push_back(out.members[p]);
        sorted.rep.push_back(out.members[p].front());
    }
    return sorted;
}

struct Curves {
    const std::vector<VisitDistFn>& fs;
    const Eigen::VectorXd& reward;
    const ValueClasses& classes;

    double value(std::size_t c, double gamma) const { return fs[classes.rep[c]](gamma).dot(reward); }
    double slope(std::size_t c, double gamma) const { return fs[classes.rep[c]].derivative(gamma).dot(reward); }

    Eigen::VectorXd all(double gamma) const {
        Eigen::VectorXd v(static_cast<Eigen::Index>(classes.size()));
        for (std::size_t c = 0; c < classes.size(); ++c) v(static_cast<Eigen::Index>(c)) = value(c, gamma);
        return v;
    }

    static double tolerance(double magnitude) { return kShiftTieTolerance * std::max(1.0, std::abs(magnitude)); }

    Signature signature(const std::vector<std::size_t>& cls) const {
        Signature s;
        for (auto c : cls) s.insert(s.end(), classes.members[c].begin(), classes.members[c].end());
        std::sort(s.begin(), s.end());
        return s;
    }

    std::vector<std::size_t> best_classes(const Eigen::VectorXd& v, double extra = 0.0) const {
        const double m = v.maxCoeff();
        std::vector<std::size_t> out;
        for (Eigen::Index c = 0; c < v.size(); ++c)
            if (v(c) >= m - tolerance(m) - extra) out.push_back(static_cast<std::size_t>(c));
        return out;
    }
};

Signature merge(const Signature& a, const Signature& b) {
    Signature out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace

Signature optimal_signature(const std::vector<VisitDistFn>& fs, const Eigen::VectorXd& reward, double gamma) {
    const auto classes = value_classes(fs, reward);
    const Curves curves{fs, reward, classes};
    return curves.signature(curves.best_classes(curves.all(gamma)));
}

ShiftProfile detect_shifts(const std::vector<VisitDistFn>& fs, const Eigen::VectorXd& reward, double grid_step) {
    if (fs.empty()) throw InvalidArgument("empty set of visit distribution functions");
    if (!(grid_step > 0.0 && grid_step <= 0.1)) throw InvalidArgument("grid step must lie in (0, 0.1]");
    const auto classes = value_classes(fs, reward);
    const Curves curves{fs, reward, classes};
    const auto cells = static_cast<std::size_t>(std::llround(1.0 / grid_step));
    const auto grid = [&](std::size_t k) { return (static_cast<double>(k) + 0.5) / static_cast<double>(cells); };

    ShiftProfile out;
    out.grid_step = 1.0 / static_cast<double>(cells);
    Eigen::MatrixXd values(static_cast<Eigen::Index>(classes.size()), static_cast<Eigen::Index>(cells));
    std::vector<std::size_t> best(cells);
    for (std::size_t k = 0; k < cells; ++k) {
        values.col(static_cast<Eigen::Index>(k)) = curves.all(grid(k));
        Eigen::Index b = 0;
        values.col(static_cast<Eigen::Index>(k)).maxCoeff(&b);
        best[k] = static_cast<std::size_t>(b);
    }
    if (classes.size() == 1) {
        out.intervals.push_back(curves.signature({0}));
        return out;
    }

    std::vector<Breakpoint> found;

    // Crossings: the best class changes between adjacent grid points.
    for (std::size_t k = 0; k + 1 < cells; ++k) {
        const auto A = best[k], B = best[k + 1];
        if (A == B) continue;
        double lo = grid(k), hi = grid(k + 1);
        const auto h = [&](double g) { return curves.value(A, g) - curves.value(B, g); };
        while (hi - lo > kBreakpointWidth) {
            const double mid = 0.5 * (lo + hi);
            (h(mid) > 0.0 ? lo : hi) = mid;
        }
        const double root = 0.5 * (lo + hi);
        const auto at_root = curves.all(root);
        const double top = std::max(at_root(static_cast<Eigen::Index>(A)), at_root(static_cast<Eigen::Index>(B)));
        for (std::size_t c = 0; c < classes.size(); ++c) {
            if (c == A || c == B) continue;
            if (at_root(static_cast<Eigen::Index>(c)) > top + Curves::tolerance(top)) {
                std::ostringstream os;
                os << "more than one optimal-set change between gamma " << grid(k) << " and " << grid(k + 1)
                   << "; use a smaller grid step";
                throw ResolutionError(os.str());
            }
        }
        Breakpoint bp;
        bp.gamma = root;
        bp.before = curves.signature({A});
        bp.after = curves.signature({B});
        bp.at = curves.signature(curves.best_classes(at_root, std::abs(h(root))));
        bp.at = merge(bp.at, merge(bp.before, bp.after));
        found.push_back(std::move(bp));
    }

    // Tangential contacts: the gap to the best class has an interior local
    // minimum that reaches zero.
    for (std::size_t k = 1; k + 1 < cells; ++k) {
        const auto A = best[k];
        if (best[k - 1] != A || best[k + 1] != A) continue;
        for (std::size_t c = 0; c < classes.size(); ++c) {
            if (c == A) continue;
            const auto gap = [&](std::size_t j) {
                return values(static_cast<Eigen::Index>(A), static_cast<Eigen::Index>(j)) -
                       values(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j));
            };
            if (!(gap(k) <= gap(k - 1) && gap(k) <= gap(k + 1))) continue;
            const auto dgap = [&](double g) { return curves.slope(A, g) - curves.slope(c, g); };
            double lo = grid(k - 1), hi = grid(k + 1);
            if (!(dgap(lo) < 0.0 && dgap(hi) > 0.0)) continue;
            while (hi - lo > kBreakpointWidth) {
                const double mid = 0.5 * (lo + hi);
                (dgap(mid) < 0.0 ? lo : hi) = mid;
            }
            const double root = 0.5 * (lo + hi);
            const double va = curves.value(A, root);
            if (std::abs(va - curves.value(c, root)) > Curves::tolerance(va)) continue;
            Breakpoint bp;
            bp.gamma = root;
            bp.before = bp.after = curves.signature({A});
            bp.at = curves.signature(curves.best_classes(curves.all(root)));
            bp.at = merge(bp.at, merge(bp.before, curves.signature({c})));
            bp.tangential = true;
            found.push_back(std::move(bp));
        }
    }

    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.gamma < b.gamma; });
    for (auto& bp : found) {
        if (!out.breakpoints.empty() && bp.gamma - out.breakpoints.back().gamma < 1e-7) {
            auto& prev = out.breakpoints.back();
            prev.at = merge(prev.at, bp.at);
            if (!bp.tangential) {
                prev.after = bp.after;
                prev.tangential = prev.before == prev.after;
            }
            continue;
        }
        out.breakpoints.push_back(std::move(bp));
    }
    out.intervals.push_back(curves.signature({best.front()}));
    for (const auto& bp : out.breakpoints) out.intervals.push_back(bp.after);
    return out;
}

ShiftProfile detect_shifts(const RewardlessMdp& mdp, const Eigen::VectorXd& reward, StateId s, double grid_step,
                           const EnumerationConfig& cfg) {
    return detect_shifts(enumerate_visit_dists(mdp, s, cfg), reward, grid_step);
}

BlackwellResult blackwell_set(const std::vector<VisitDistFn>& fs, const Eigen::VectorXd& reward) {
    if (fs.empty()) throw InvalidArgument("empty set of visit distribution functions");
    const auto classes = value_classes(fs, reward);
    const Curves curves{fs, reward, classes};
    const double probes[] = {0.999, 0.9999, 1.0 - 1e-5, 1.0 - 1e-6, 1.0 - 1e-7};
    Signature prev = curves.signature(curves.best_classes(curves.all(probes[0])));
    for (std::size_t i = 1; i < std::size(probes); ++i) {
        auto cur = curves.signature(curves.best_classes(curves.all(probes[i])));
        if (cur == prev) return {std::move(cur), probes[i - 1], probes[i]};
        prev = std::move(cur);
    }
    throw Indeterminate("optimal set still changing at gamma = 1 - 1e-7");
}

std::optional<ShiftWitness> shift_possible(const RewardlessMdp& mdp, StateId s0) {
    mdp.require_valid();
    if (s0 >= mdp.num_states()) throw LookupError("state index out of range");
    if (!mdp.is_deterministic())
        throw UnsupportedStructure("shift characterization is only available for deterministic MDPs");
    const auto ch0 = children(mdp, s0);
    for (auto s1 : ch0.members()) {
        const auto ch1 = children(mdp, s1);
        for (auto s1p : ch0.members()) {
            for (auto s2p : children(mdp, s1p).members()) {
                if (ch1.contains(s2p)) continue;
                if (!ch0.contains(s2p) || (!ch1.contains(s1) && !ch1.contains(s1p))) return ShiftWitness{s1, s1p, s2p};
            }
        }
    }
    return std::nullopt;
}

Eigen::VectorXd transfer_reward(const RewardlessMdp& mdp, const Eigen::VectorXd& reward, double gamma_star,
                                double gamma_target) {
    if (!(gamma_star > 0.0 && gamma_star < 1.0 && gamma_target > 0.0 && gamma_target < 1.0))
        throw InvalidArgument("transfer_reward needs both discount rates in (0, 1)");
    const auto opt = optimal_policy(mdp, reward, gamma_star);
    const Eigen::MatrixXd P = transition_matrix(mdp, opt.policy);
    return opt.values - gamma_target * (P * opt.values);
}

} // namespace powermdp
