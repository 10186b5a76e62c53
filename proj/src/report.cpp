#include "powermdp/report.hpp"

#include "powermdp/errors.hpp"

#include <cmath>
#include <sstream>

namespace powermdp {

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json AnalysisReport::to_json() const {
    Json j;
    j["command"] = command;
    j["config"] = config;
    j["results"] = results;
    j["tool_version"] = tool_version;
    j["wall_clock_seconds"] = wall_clock_seconds;
    return j;
}

AnalysisReport AnalysisReport::from_json(const Json& j) {
    AnalysisReport r;
    try {
        r.command = j.at("command").get<std::vector<std::string>>();
        r.config = j.at("config");
        r.results = j.at("results");
        r.tool_version = j.at("tool_version").get<std::string>();
        r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed analysis report: ") + e.what());
    }
    return r;
}

std::string AnalysisReport::dump() const { return to_json().dump(2) + "\n"; }

Json to_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
    return out;
}

Json to_json(const RewardlessMdp& mdp, const Eigen::VectorXd& v) {
    Json out = Json::object();
    for (StateId s = 0; s < mdp.num_states(); ++s) out[mdp.state_name(s)] = number(v(static_cast<Eigen::Index>(s)));
    return out;
}

Json to_json(const RewardlessMdp& mdp, const Policy& pi, const StateSet& states) {
    Json out = Json::object();
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        if (states.universe() != 0 && !states.contains(s)) continue;
        out[mdp.state_name(s)] = mdp.action_name(s, pi.action.at(s));
    }
    return out;
}

Json to_json(const PowerEstimate& e) {
    Json out;
    out["estimate"] = number(e.estimate);
    out["stderr"] = number(e.std_error);
    out["samples"] = e.samples;
    out["gamma"] = e.gamma;
    out["method"] = e.method;
    if (e.bracket) out["bracket"] = {e.bracket->first, e.bracket->second};
    return out;
}

Json to_json(const OptProbEstimate& e) {
    Json out;
    out["gamma"] = e.gamma;
    out["samples"] = e.samples;
    out["ties"] = e.ties;
    out["probabilities"] = e.probabilities;
    out["stderr"] = e.std_errors;
    if (e.probabilities.size() >= 2) {
        out["paired_difference"] = e.paired_difference;
        out["paired_stderr"] = e.paired_std_error;
    }
    out["warnings"] = e.warnings;
    return out;
}

Json to_json(const RewardlessMdp& mdp, const NondomResult& r, const std::vector<VisitDistFn>& fs) {
    Json out;
    out["gamma_check"] = r.gamma;
    out["members"] = r.members;
    Json entries = Json::array();
    for (const auto& e : r.entries) {
        Json j;
        j["index"] = e.index;
        if (e.index < fs.size()) j["policy"] = to_json(mdp, fs[e.index].policy(), fs[e.index].reached());
        j["included"] = e.included;
        j["margin"] = number(e.margin);
        if (e.certificate) {
            j["certificate"] = {{"witness", to_json(e.certificate->witness)},
                                {"margin", number(e.certificate->margin)},
                                {"gamma", e.certificate->gamma}};
        }
        if (!e.failure.empty()) j["failure"] = e.failure;
        entries.push_back(std::move(j));
    }
    out["entries"] = std::move(entries);
    return out;
}

Json to_json(const RewardlessMdp& mdp, const std::vector<Rsd>& rsds) {
    Json out = Json::array();
    for (const auto& d : rsds) {
        Json dist = Json::object();
        for (StateId s = 0; s < mdp.num_states(); ++s) {
            const double p = d.distribution(static_cast<Eigen::Index>(s));
            if (p > kRsdTolerance) dist[mdp.state_name(s)] = p;
        }
        out.push_back({{"distribution", dist}, {"vector", to_json(d.distribution)}, {"policy", to_json(mdp, d.policy)}});
    }
    return out;
}

Json to_json(const ShiftProfile& p) {
    Json out;
    out["grid_step"] = p.grid_step;
    out["tolerance"] = p.tolerance;
    Json bps = Json::array();
    for (const auto& b : p.breakpoints)
        bps.push_back({{"gamma", b.gamma},
                       {"before", b.before},
                       {"after", b.after},
                       {"at", b.at},
                       {"tangential", b.tangential}});
    out["breakpoints"] = std::move(bps);
    out["intervals"] = p.intervals;
    return out;
}

Json to_json(const RewardlessMdp& mdp, const BottleneckResult& b) {
    Json out;
    out["holds"] = b.holds;
    if (!b.reason.empty()) out["reason"] = b.reason;
    Json path = Json::array();
    for (auto s : b.violating_path) path.push_back(mdp.state_name(s));
    out["violating_path"] = std::move(path);
    Json cut = Json::array();
    for (auto s : b.cut_side.members()) cut.push_back(mdp.state_name(s));
    out["cut_side"] = std::move(cut);
    return out;
}

Json to_json(const RewardlessMdp& mdp, const TheoremVerdict& v) {
    Json out;
    out["theorem"] = v.theorem;
    out["holds"] = v.holds;
    out["hypotheses_hold"] = v.hypotheses_hold;
    out["inconclusive"] = v.inconclusive;
    if (!v.failing_clause.empty()) out["failing_clause"] = v.failing_clause;
    out["strict"] = v.strict;
    if (v.permutation) {
        Json perm = Json::object();
        for (std::size_t i = 0; i < v.permutation->map.size(); ++i)
            if (v.permutation->map[i] != i) perm[mdp.state_name(i)] = mdp.state_name(v.permutation->map[i]);
        out["permutation"] = std::move(perm);
        out["image"] = v.image;
    }
    Json bn = Json::array();
    for (const auto& b : v.bottlenecks) bn.push_back(to_json(mdp, b));
    out["bottlenecks"] = std::move(bn);
    Json conf = Json::array();
    for (const auto& c : v.confirmations)
        conf.push_back({{"gamma", c.gamma},
                        {"quantity", c.quantity},
                        {"larger", c.larger},
                        {"larger_stderr", c.larger_se},
                        {"smaller", c.smaller},
                        {"smaller_stderr", c.smaller_se},
                        {"difference_stderr", c.difference_se},
                        {"strict_expected", c.strict_expected},
                        {"confirmed", c.confirmed}});
    out["confirmations"] = std::move(conf);
    out["notes"] = v.notes;
    return out;
}

std::string to_csv(const std::vector<CsvRow>& rows) {
    std::ostringstream os;
    os.precision(10);
    os << "gamma,target,estimate,stderr\n";
    for (const auto& r : rows) os << r.gamma << ',' << r.target << ',' << r.estimate << ',' << r.std_error << '\n';
    return os.str();
}

} // namespace powermdp
