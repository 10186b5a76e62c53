#include "powermdp/figures.hpp"

#include "powermdp/errors.hpp"
#include "powermdp/mdp_io.hpp"
#include "powermdp/nondom.hpp"
#include "powermdp/optprob.hpp"
#include "powermdp/power.hpp"
#include "powermdp/rsd.hpp"
#include "powermdp/shifts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

namespace powermdp {

RewardlessMdp load_fixture(const std::string& name, const std::filesystem::path& dir) {
    return load_mdp(dir / (name + ".json"));
}

std::vector<std::size_t> visiting(const std::vector<VisitDistFn>& fs, StateId s) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fs.size(); ++i)
        if (fs[i].probe_values().row(static_cast<Eigen::Index>(s)).maxCoeff() > 1e-12) out.push_back(i);
    return out;
}

bool FigureBundle::pass() const {
    return std::all_of(items.begin(), items.end(), [](const FigureItem& i) { return i.pass; });
}

Json FigureBundle::to_json() const {
    Json out;
    out["id"] = id;
    out["description"] = description;
    out["pass"] = pass();
    Json js = Json::array();
    for (const auto& i : items)
        js.push_back({{"name", i.name},
                      {"expected", number(i.expected)},
                      {"tolerance", i.tolerance},
                      {"observed", number(i.observed)},
                      {"stderr", number(i.std_error)},
                      {"pass", i.pass}});
    out["items"] = std::move(js);
    return out;
}

double thm53_root_oracle() {
    auto g = [](double x) { return 0.1 + x * x / (1.0 - x) - x; };
    double lo = 0.0, hi = 0.3;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(lo) > 0) == (g(mid) > 0) ? lo = mid : hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

struct Builder {
    FigureBundle b;

    void value(std::string name, double expected, double tol, double observed, double se = 0.0) {
        const bool ok = std::isfinite(observed) && std::abs(observed - expected) <= tol;
        b.items.push_back({std::move(name), expected, tol, observed, se, ok});
    }
    void flag(std::string name, bool observed, double se = 0.0) {
        b.items.push_back({std::move(name), 1.0, 0.0, observed ? 1.0 : 0.0, se, observed});
    }
    void row(double gamma, std::string target, double estimate, double se) {
        b.csv.push_back({gamma, std::move(target), estimate, se});
    }
};

const std::vector<double>& tenth_grid() {
    static const std::vector<double> g{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    return g;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

std::vector<VisitDistFn> fnd(const RewardlessMdp& mdp, StateId s) {
    return nondominated_functions(enumerate_visit_dists(mdp, s));
}

Eigen::VectorXd reward_fixture(const std::string& name, const RewardlessMdp& mdp, const std::filesystem::path& dir) {
    return load_reward(dir / (name + ".json"), mdp);
}

/// Index of the RSD equal to the indicator of s, or npos.
std::size_t indicator_rsd(const std::vector<Rsd>& rsds, StateId s) {
    for (std::size_t i = 0; i < rsds.size(); ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(rsds[i].distribution.size());
        e(static_cast<Eigen::Index>(s)) = 1.0;
        if ((rsds[i].distribution - e).cwiseAbs().maxCoeff() <= kRsdTolerance) return i;
    }
    return static_cast<std::size_t>(-1);
}

void fig1(Builder& out, const McConfig&, const std::filesystem::path& dir) {
    const auto mdp = load_fixture("fig1", dir);
    const StateId s1 = mdp.state_id("s1"), s2 = mdp.state_id("s2");
    const auto fs = enumerate_visit_dists(mdp, s1);
    out.value("|F(s1)|", 2, 0, static_cast<double>(fs.size()));
    const auto via_s2 = visiting(fs, s2);
    Eigen::VectorXd expected(3);
    expected << 1.0, 1.0, 0.0;
    const double err = via_s2.size() == 1 ? (fs[via_s2[0]](0.5) - expected).cwiseAbs().maxCoeff() : 1.0;
    out.value("f(0.5) for to_s2 vs (1,1,0), max error", 0, 1e-9, err);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(3);
    r(static_cast<Eigen::Index>(s2)) = 1.0;
    out.value("V*(s1, 0.5) for R = e_s2", 1, 1e-9, optimal_value(fs, r, 0.5).value);
}

void fig2(Builder& out, const McConfig& mc, const std::filesystem::path& dir) {
    const auto a = load_fixture("fig2a", dir);
    const auto b = load_fixture("fig2b", dir);
    const auto u = RewardDistSpec::uniform();
    const auto pa = power_at(a, a.state_id("s1"), 2.0 / 3.0, u, mc);
    out.value("POWER(s1, 2/3) on the left component", 2.0 / 3.0, 0.01, pa.estimate, pa.std_error);
    out.row(2.0 / 3.0, "POWER(s1)", pa.estimate, pa.std_error);
    for (double g : {0.25, 0.5, 0.75}) {
        const auto pb = power_at(b, b.state_id("s2"), g, u, mc);
        out.value("POWER(s2, " + fmt(g) + ") on the right component", 2.0 / 3.0, 0.01, pb.estimate, pb.std_error);
        out.row(g, "POWER(s2)", pb.estimate, pb.std_error);
    }
    const auto p0 = power_limit_0(a, a.state_id("hub"), u);
    out.value("POWER(hub) as gamma -> 0", 0.75, 1e-12, p0.estimate, p0.std_error);
}

void fig3(Builder& out, const McConfig&, const std::filesystem::path& dir) {
    const std::vector<std::pair<std::string, bool>> labels{
        {"fig3a", true}, {"fig3b", true}, {"fig3c", false}, {"fig3d", false}};
    for (const auto& [name, label] : labels) {
        const auto mdp = load_fixture(name, dir);
        const bool possible = shift_possible(mdp, mdp.state_id("s0")).has_value();
        out.value(name + ": shift possible", label ? 1 : 0, 0, possible ? 1 : 0);
    }
}

void fig6(Builder& out, const McConfig& mc, const std::filesystem::path& dir) {
    const auto mdp = load_fixture("fig6", dir);
    const auto u = RewardDistSpec::uniform();
    const auto fs = fnd(mdp, mdp.state_id("s2"));
    const std::vector<Target> targets{visiting(fs, mdp.state_id("u")), visiting(fs, mdp.state_id("t1")),
                                      visiting(fs, mdp.state_id("t2"))};
    const std::vector<std::string> names{"up", "right,up", "right,right"};
    for (double g : tenth_grid()) {
        const auto est = optprob(fs, targets, g, u, mc);
        const double up = (3.0 - g) / 6.0, other = (3.0 + g) / 12.0;
        for (std::size_t t = 0; t < targets.size(); ++t) {
            out.value("P(s2: " + names[t] + ", " + fmt(g) + ")", t == 0 ? up : other, 0.01, est.probabilities[t],
                      est.std_errors[t]);
            out.row(g, names[t], est.probabilities[t], est.std_errors[t]);
        }
    }
    const auto f1 = fnd(mdp, mdp.state_id("s1"));
    const std::vector<Target> sides{visiting(f1, mdp.state_id("a1")), visiting(f1, mdp.state_id("b1"))};
    const auto est = optprob(f1, sides, 0.5, u, mc);
    out.value("P(s1: up, 0.5)", 0.5, 0.01, est.probabilities[0], est.std_errors[0]);
    out.value("P(s1: right, 0.5)", 0.5, 0.01, est.probabilities[1], est.std_errors[1]);
}

void fig7(Builder& out, const McConfig& mc, const std::filesystem::path& dir) {
    const auto mdp = load_fixture("fig7", dir);
    const auto fs = fnd(mdp, mdp.state_id("s1"));
    const std::vector<Target> targets{visiting(fs, mdp.state_id("u")), visiting(fs, mdp.state_id("t"))};
    const auto u = RewardDistSpec::uniform();
    const auto p2 = RewardDistSpec::power_cdf(2.0);
    for (double g : tenth_grid()) {
        const auto eu = optprob(fs, targets, g, u, mc);
        out.value("uniform P(up, " + fmt(g) + ")", 0.5, 0.01, eu.probabilities[0], eu.std_errors[0]);
        out.value("uniform P(right, " + fmt(g) + ")", 0.5, 0.01, eu.probabilities[1], eu.std_errors[1]);
        out.row(g, "uniform:up", eu.probabilities[0], eu.std_errors[0]);
        const auto ep = optprob(fs, targets, g, p2, mc);
        out.value("pow:2 P(up, " + fmt(g) + ") vs (10+3g-3g^2)/20", (10 + 3 * g - 3 * g * g) / 20, 0.01,
                  ep.probabilities[0], ep.std_errors[0]);
        out.value("pow:2 P(up, " + fmt(g) + ") vs exact (9+2g-2g^2)/18", (9 + 2 * g - 2 * g * g) / 18, 0.01,
                  ep.probabilities[0], ep.std_errors[0]);
        out.row(g, "pow:2:up", ep.probabilities[0], ep.std_errors[0]);
    }
}

void fig8(Builder& out, const McConfig& mc, const std::filesystem::path& dir) {
    const auto mdp = load_fixture("fig8", dir);
    const StateId s1 = mdp.state_id("s1"), s2 = mdp.state_id("s2"), s3 = mdp.state_id("s3");
    const auto p2 = RewardDistSpec::power_cdf(2.0);
    const auto fs = fnd(mdp, s1);
    const auto est = optprob(fs, {visiting(fs, s2)}, 0.12, p2, mc);
    out.value("pow:2 P(up through s2, 0.12)", 0.91, 0.01, est.probabilities[0], est.std_errors[0]);
    out.row(0.12, "up", est.probabilities[0], est.std_errors[0]);
    for (double g : {0.12, 0.5, 0.9}) {
        const auto a = power_at(mdp, s3, g, p2, mc);
        const auto b = power_at(mdp, s2, g, p2, mc);
        out.flag("pow:2 POWER(s3) > POWER(s2) beyond 3 SE at " + fmt(g), strictly_greater(a, b),
                 std::hypot(a.std_error, b.std_error));
        out.row(g, "POWER(s3)", a.estimate, a.std_error);
        out.row(g, "POWER(s2)", b.estimate, b.std_error);
    }
}

void fig10(Builder& out, const McConfig&, const std::filesystem::path& dir) {
    const auto mdp = load_fixture("fig10", dir);
    const auto r = reward_fixture("fig10_reward", mdp, dir);
    const auto fs = enumerate_visit_dists(mdp, mdp.state_id("s1"));
    const auto near = visiting(fs, mdp.state_id("s2"));
    const auto far = visiting(fs, mdp.state_id("s4"));
    out.flag("optimal at 0.5 goes to s2", optimal_value(fs, r, 0.5).argmax == near);
    const auto profile = detect_shifts(fs, r);
    out.value("breakpoints", 1, 0, static_cast<double>(profile.breakpoints.size()));
    out.value("breakpoint", 0.9, 1e-6, profile.breakpoints.empty() ? NAN : profile.breakpoints.front().gamma);
    out.flag("Blackwell optimal set goes to s4", blackwell_set(fs, r).signature == far);
}

void fig11(Builder& out, const McConfig& mc, const std::filesystem::path& dir) {
    const auto mdp = load_fixture("fig11", dir);
    const StateId s1 = mdp.state_id("s1"), s2 = mdp.state_id("s2");
    const auto u = RewardDistSpec::uniform();
    const auto members = nondominated_rsds(mdp, s1).members;
    std::vector<Target> targets;
    Target avoid;
    for (std::size_t i = 0; i < members.size(); ++i)
        if (members[i].distribution(static_cast<Eigen::Index>(s2)) <= kRsdTolerance) avoid.push_back(i);
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        const auto i = indicator_rsd(members, s);
        targets.push_back(i < members.size() ? Target{i} : Target{});
    }
    targets.push_back(avoid);
    const auto est = optprob_gamma1(members, targets, u, mc);
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        out.value("P(loop at " + mdp.state_name(s) + ", 1)", 1.0 / 11, 0.01, est.probabilities[s], est.std_errors[s]);
        out.row(1.0, "loop:" + mdp.state_name(s), est.probabilities[s], est.std_errors[s]);
    }
    const std::size_t k = mdp.num_states();
    out.value("P(avoid s2, 1)", 10.0 / 11, 0.01, est.probabilities[k], est.std_errors[k]);
    out.row(1.0, "avoid:s2", est.probabilities[k], est.std_errors[k]);
    const auto p1 = power_limit_1(mdp, s1, u, mc);
    out.value("POWER(s1) as gamma -> 1", 11.0 / 12, 0.01, p1.estimate, p1.std_error);
    out.row(1.0, "POWER(s1)", p1.estimate, p1.std_error);
}

void fig13b(Builder& out, const McConfig& mc, const std::filesystem::path& dir) {
    const auto mdp = load_fixture("fig13b", dir);
    const StateId a = mdp.state_id("A"), b = mdp.state_id("B"), c = mdp.state_id("C");
    const auto fs = enumerate_visit_dists(mdp, a);
    const auto nd = nondominated_set(fs);
    std::size_t dominated = fs.size();
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const auto& row = fs[i].probe_values();
        if (row.row(static_cast<Eigen::Index>(b)).maxCoeff() > 1e-12 &&
            row.row(static_cast<Eigen::Index>(c)).maxCoeff() > 1e-12)
            dominated = i;
    }
    const bool excluded = dominated < fs.size() &&
                          std::find(nd.members.begin(), nd.members.end(), dominated) == nd.members.end();
    out.flag("f through B then C excluded from F_nd(A)", excluded);

    const auto members = nondominated_rsds(mdp, a).members;
    const auto ib = indicator_rsd(members, b);
    const auto id = indicator_rsd(members, mdp.state_id("D"));
    const auto ie = indicator_rsd(members, mdp.state_id("E"));
    if (ib >= members.size() || id >= members.size() || ie >= members.size())
        throw Error("fig13b: expected indicator RSDs at B, D and E");
    const auto est = optprob_gamma1(members, {{id, ie}, {ib}}, RewardDistSpec::uniform(), mc);
    out.value("P(up-right RSDs, 1)", 2.0 / 3, 0.01, est.probabilities[0], est.std_errors[0]);
    out.value("P(up RSD, 1)", 1.0 / 3, 0.01, est.probabilities[1], est.std_errors[1]);
}

void fig14(Builder& out, const McConfig&, const std::filesystem::path& dir) {
    const auto mdp = load_fixture("fig14", dir);
    const auto analysis = nondominated_rsds(mdp, mdp.state_id("s1"));
    Eigen::VectorXd half = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mdp.num_states()));
    half(static_cast<Eigen::Index>(mdp.state_id("s3"))) = 0.5;
    half(static_cast<Eigen::Index>(mdp.state_id("s4"))) = 0.5;
    std::size_t at = analysis.all.size();
    for (std::size_t i = 0; i < analysis.all.size(); ++i)
        if ((analysis.all[i].distribution - half).cwiseAbs().maxCoeff() <= kRsdTolerance) at = i;
    out.flag("(s3+s4)/2 is in RSD(s1)", at < analysis.all.size());
    const auto& m = analysis.nondominated.members;
    out.flag("(s3+s4)/2 is excluded from RSD_nd(s1)",
             at < analysis.all.size() && std::find(m.begin(), m.end(), at) == m.end());
    out.value("|RSD_nd(s1)|", 2, 0, static_cast<double>(m.size()));
}

void fig16(Builder& out, const McConfig& mc, const std::filesystem::path& dir) {
    const auto mdp = load_fixture("fig16", dir);
    const StateId s1 = mdp.state_id("s1");
    const auto u = RewardDistSpec::uniform();
    auto index_of = [&](const PowerSeekingOrder& o, const std::string& action) {
        const ActionId a = mdp.action_id(s1, action);
        for (std::size_t i = 0; i < o.classes.size(); ++i)
            if (std::find(o.classes[i].actions.begin(), o.classes[i].actions.end(), a) != o.classes[i].actions.end())
                return i;
        throw Error("fig16: action class not found");
    };
    const auto low = power_seeking_order(mdp, s1, 0.0, u, mc);
    const auto down = index_of(low, "down"), up = index_of(low, "up");
    out.flag("gamma -> 0: down seeks strictly more POWER than up", low.strict[down][up]);
    out.value("gamma -> 0: E POWER after down", 2.0 / 3, 1e-9, low.classes[down].expected_power.estimate);
    out.value("gamma -> 0: E POWER after up", 0.5, 1e-9, low.classes[up].expected_power.estimate);
    const auto high = power_seeking_order(mdp, s1, 1.0, u, mc);
    const auto stay = index_of(high, "stay");
    bool dominates = true;
    for (std::size_t j = 0; j < high.classes.size(); ++j)
        if (j != stay) dominates = dominates && high.strict[stay][j];
    out.flag("gamma -> 1: stay seeks strictly more POWER than every other class", dominates);
    const auto& st = high.classes[stay].expected_power;
    out.value("gamma -> 1: E POWER after stay", 6.0 / 7, 0.01, st.estimate, st.std_error);
}

void subopt(Builder& out, const McConfig&, const std::filesystem::path& dir) {
    const auto mdp = load_fixture("subopt", dir);
    const auto r = reward_fixture("subopt_reward", mdp, dir);
    const auto fs = enumerate_visit_dists(mdp, mdp.state_id("s0"));
    const auto profile = detect_shifts(fs, r);
    out.value("breakpoints", 1, 0, static_cast<double>(profile.breakpoints.size()));
    const bool any = !profile.breakpoints.empty();
    out.value("breakpoint", 0.5, 1e-6, any ? profile.breakpoints.front().gamma : NAN);
    out.flag("breakpoint is a tangential contact", any && profile.breakpoints.front().tangential);
    const auto via_x1 = visiting(fs, mdp.state_id("x1"));
    Signature shortcut;
    for (std::size_t i = 0; i < fs.size(); ++i)
        if (std::find(via_x1.begin(), via_x1.end(), i) == via_x1.end()) shortcut.push_back(i);
    out.flag("Blackwell optimal set is the shortcut", blackwell_set(fs, r).signature == shortcut);
}

void thm53_root(Builder& out, const McConfig&, const std::filesystem::path& dir) {
    const auto mdp = load_fixture("thm53", dir);
    const auto r = reward_fixture("thm53_reward", mdp, dir);
    const auto profile = detect_shifts(enumerate_visit_dists(mdp, mdp.state_id("s0")), r);
    const double root = thm53_root_oracle();
    const double second = (1.1 + std::sqrt(0.41)) / 4.0;
    const auto& bps = profile.breakpoints;
    out.value("breakpoints", 2, 0, static_cast<double>(bps.size()));
    out.value("first breakpoint vs bisection root", root, 1e-4, bps.empty() ? NAN : bps[0].gamma);
    out.value("second breakpoint vs closed-form root", second, 1e-4, bps.size() < 2 ? NAN : bps[1].gamma);
}

using Runner = std::function<void(Builder&, const McConfig&, const std::filesystem::path&)>;

const std::map<std::string, std::pair<std::string, Runner>>& registry() {
    static const std::map<std::string, std::pair<std::string, Runner>> r{
        {"fig1", {"visit distribution functions of a two-way choice", fig1}},
        {"fig2", {"POWER of a three-terminal hub and a two-terminal choice", fig2}},
        {"fig3", {"whether an optimal policy shift is possible", fig3}},
        {"fig6", {"optimality probability of each branch across discount rates", fig6}},
        {"fig7", {"optimality probability of up under uniform and CDF x^2 rewards", fig7}},
        {"fig8", {"POWER versus optimality probability under CDF x^2 rewards", fig8}},
        {"fig10", {"optimal policy shift at 0.9 and the Blackwell optimal set", fig10}},
        {"fig11", {"optimality probability of terminal loops as gamma -> 1", fig11}},
        {"fig13b", {"a dominated visit distribution function and RSD-level probabilities", fig13b}},
        {"fig14", {"a dominated recurrent state distribution", fig14}},
        {"fig16", {"POWER-seeking actions at both discount limits", fig16}},
        {"subopt", {"tangential optimality contact at 0.5", subopt}},
        {"thm53-root", {"breakpoints of the constructive shift instance", thm53_root}},
    };
    return r;
}

} // namespace

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"fig1",  "fig2",  "fig3",   "fig6", "fig7",   "fig8",      "fig10",
                                              "fig11", "fig13b", "fig14", "fig16", "subopt", "thm53-root"};
    return ids;
}

FigureBundle run_figure(const std::string& id, const McConfig& mc, const std::filesystem::path& dir) {
    const auto& reg = registry();
    const auto it = reg.find(id);
    if (it == reg.end()) throw LookupError("unknown figure id: " + id);
    Builder b;
    b.b.id = id;
    b.b.description = it->second.first;
    it->second.second(b, mc, dir);
    return std::move(b.b);
}

} // namespace powermdp
