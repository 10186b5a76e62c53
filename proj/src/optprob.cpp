#include "powermdp/optprob.hpp"

#include "powermdp/errors.hpp"
#include "powermdp/nondom.hpp"
#include "powermdp/power.hpp"

#include <cmath>
#include <sstream>

namespace powermdp {

namespace {

struct Tally {
    std::vector<std::uint64_t> hits;
    std::uint64_t ties = 0;
    std::uint64_t count = 0;
    RunningStats paired;
};

} // namespace

OptProbEstimate optprob_columns(const Eigen::MatrixXd& candidates, const std::vector<Target>& targets,
                                const RewardDistSpec& spec, const McConfig& mc, double gamma_tag) {
    if (mc.samples < 1) throw InvalidArgument("at least one sample is required");
    const auto k = static_cast<std::size_t>(candidates.cols());
    if (k == 0) throw InvalidArgument("no candidates to compare");
    // membership[c][t]: candidate c belongs to target t.
    std::vector<std::vector<bool>> membership(k, std::vector<bool>(targets.size(), false));
    for (std::size_t t = 0; t < targets.size(); ++t)
        for (auto c : targets[t]) {
            if (c >= k) throw LookupError("target refers to a candidate that does not exist");
            membership[c][t] = true;
        }

    const auto n = static_cast<std::size_t>(candidates.rows());
    const auto make = [&] { return Tally{std::vector<std::uint64_t>(targets.size(), 0), 0, 0, {}}; };
    const auto tally = run_chunked<Tally>(
        mc.samples, mc.threads, make,
        [&](std::uint64_t i, Tally& acc) {
            const Eigen::VectorXd r = spec.draw(mc.seed, i, n);
            const Eigen::VectorXd values = candidates.transpose() * r;
            Eigen::Index best = 0;
            values.maxCoeff(&best);
            bool tie = false;
            for (Eigen::Index j = 0; j < values.size(); ++j)
                if (j != best && values(j) >= values(best) - kTieTolerance) tie = true;
            ++acc.count;
            double d = 0.0;
            if (tie) {
                ++acc.ties;
            } else {
                const auto& m = membership[static_cast<std::size_t>(best)];
                for (std::size_t t = 0; t < targets.size(); ++t)
                    if (m[t]) ++acc.hits[t];
                if (targets.size() >= 2) d = (m[0] ? 1.0 : 0.0) - (m[1] ? 1.0 : 0.0);
            }
            acc.paired.add(d);
        },
        [](Tally& total, const Tally& part) {
            for (std::size_t t = 0; t < total.hits.size(); ++t) total.hits[t] += part.hits[t];
            total.ties += part.ties;
            total.count += part.count;
            total.paired.merge(part.paired);
        });

    OptProbEstimate out;
    out.samples = tally.count;
    out.ties = tally.ties;
    out.gamma = gamma_tag;
    const double nn = static_cast<double>(tally.count);
    for (auto h : tally.hits) {
        const double p = static_cast<double>(h) / nn;
        out.probabilities.push_back(p);
        out.std_errors.push_back(std::sqrt(p * (1.0 - p) / nn));
    }
    if (targets.size() >= 2) {
        out.paired_difference = tally.paired.mean;
        out.paired_std_error = tally.paired.std_error();
    }
    return out;
}

OptProbEstimate optprob(const std::vector<VisitDistFn>& nondominated, const std::vector<Target>& targets,
                        double gamma, const RewardDistSpec& spec, const McConfig& mc) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("optprob needs 0 < gamma < 1");
    return optprob_columns(stack_at(nondominated, gamma), targets, spec, mc, gamma);
}

OptProbEstimate optprob_near1(const std::vector<VisitDistFn>& nondominated, const std::vector<Target>& targets,
                              const RewardDistSpec& spec, const McConfig& mc) {
    const auto lo = optprob(nondominated, targets, 0.99, spec, mc);
    auto hi = optprob(nondominated, targets, 0.999, spec, mc);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const double gap = std::abs(hi.probabilities[t] - lo.probabilities[t]);
        if (gap > kStrictnessSigmas * std::hypot(hi.std_errors[t], lo.std_errors[t])) {
            std::ostringstream os;
            os << "target " << t << ": estimates at gamma 0.99 (" << lo.probabilities[t] << ") and 0.999 ("
               << hi.probabilities[t] << ") disagree";
            hi.warnings.push_back(os.str());
        }
    }
    return hi;
}

OptProbEstimate optprob_gamma1(const std::vector<Rsd>& nondominated, const std::vector<Target>& targets,
                               const RewardDistSpec& spec, const McConfig& mc) {
    return optprob_columns(stack(nondominated), targets, spec, mc, 1.0);
}

Target restrict_by_action(const RewardlessMdp& mdp, const std::vector<VisitDistFn>& nondominated, StateId at_state,
                          ActionId a) {
    if (at_state >= mdp.num_states()) throw LookupError("state index out of range");
    if (a >= mdp.num_actions(at_state)) throw LookupError("action index out of range");
    const auto cls = action_classes(mdp, at_state).class_of[a];
    Target out;
    for (std::size_t i = 0; i < nondominated.size(); ++i) {
        const auto& f = nondominated[i];
        const bool visits = f.probe_values().row(static_cast<Eigen::Index>(at_state)).cwiseAbs().maxCoeff() > 0.0;
        if (!visits) {
            out.push_back(i);
            continue;
        }
        const auto& used = f.inducing_classes();
        const bool takes = used.empty() ? action_classes(mdp, at_state).class_of[f.policy().action[at_state]] == cls
                                        : used[at_state][cls];
        if (takes) out.push_back(i);
    }
    return out;
}

RobustInstrumentality robust_instrumentality(const RewardlessMdp& mdp, StateId start, StateId at_state, ActionId a,
                                             ActionId a_prime, double gamma, const RewardDistSpec& spec,
                                             const McConfig& mc, const EnumerationConfig& cfg) {
    const auto fnd = nondominated_functions(enumerate_visit_dists(mdp, start, cfg));
    const std::vector<Target> targets{restrict_by_action(mdp, fnd, at_state, a),
                                      restrict_by_action(mdp, fnd, at_state, a_prime)};
    RobustInstrumentality out;
    out.estimate = optprob(fnd, targets, gamma, spec, mc);
    const double d = out.estimate.paired_difference;
    const double bound = kStrictnessSigmas * out.estimate.paired_std_error;
    out.verdict = d > bound ? "a" : (-d > bound ? "a_prime" : "tie");
    return out;
}

} // namespace powermdp
