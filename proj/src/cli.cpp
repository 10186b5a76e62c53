#include "powermdp/cli.hpp"

#include "powermdp/errors.hpp"
#include "powermdp/figures.hpp"
#include "powermdp/mdp_io.hpp"
#include "powermdp/nondom.hpp"
#include "powermdp/optprob.hpp"
#include "powermdp/power.hpp"
#include "powermdp/report.hpp"
#include "powermdp/rsd.hpp"
#include "powermdp/shifts.hpp"
#include "powermdp/theorems.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace powermdp::cli {

namespace {

/// Bad flag values; mapped to the usage exit code.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string mdp;
    std::string state;
    std::string gamma = "0.5";
    std::string dist = "uniform";
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    double max_policies = 1e6;
    unsigned threads = 0;
    std::string out;
    std::string csv;
    std::string reward;
    std::string at_state;
    std::string actions;
    std::string other_state;
    std::string d;
    std::string d_prime;
    double grid_step = 1e-3;
    bool nondominated_only = false;
    std::string figure;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("invalid " + what + ": '" + text + "'");
    }
}

template <class F>
auto as_usage(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const LookupError&) {
        throw;
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

class Session {
public:
    Session(const Options& o, std::vector<std::string> command, std::ostream& out, std::ostream& err)
        : o_(o), out_(out), err_(err) {
        report_.command = std::move(command);
        mc_ = McConfig{o.samples, o.seed, o.threads};
        cfg_ = EnumerationConfig{o.max_policies};
        if (o.samples < kMinPowerSamples) throw UsageError("--samples must be at least " + std::to_string(kMinPowerSamples));
        if (!(o.max_policies >= 1)) throw UsageError("--max-policies must be at least 1");
        report_.config = {{"gamma", o.gamma},
                          {"dist", o.dist},
                          {"samples", o.samples},
                          {"seed", o.seed},
                          {"max_policies", o.max_policies},
                          {"threads", resolve_threads(o.threads)}};
    }

    RewardlessMdp mdp() {
        if (o_.mdp.empty()) throw UsageError("--mdp is required");
        auto m = load_mdp(o_.mdp);
        return m;
    }
    StateId state(const RewardlessMdp& m, const std::string& name, const char* flag) const {
        if (name.empty()) throw UsageError(std::string(flag) + " is required");
        return m.state_id(name);
    }
    RewardDistSpec dist() const {
        return as_usage([&] { return RewardDistSpec::parse(o_.dist); });
    }
    std::vector<double> gammas() const {
        return as_usage([&] { return parse_gamma_grid(o_.gamma); });
    }

    int finish(Json results, const std::vector<CsvRow>& rows, bool sweep, int code = kExitOk) {
        report_.results = std::move(results);
        report_.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
        const std::string text = report_.dump();
        if (o_.out.empty()) {
            out_ << text;
        } else {
            write(o_.out, text);
            err_ << "wrote " << o_.out << "\n";
        }
        std::string csv_path = o_.csv;
        if (csv_path.empty() && sweep && !o_.out.empty())
            csv_path = std::filesystem::path(o_.out).replace_extension(".csv").string();
        if (!csv_path.empty() && !rows.empty()) {
            write(csv_path, to_csv(rows));
            err_ << "wrote " << csv_path << "\n";
        }
        return code;
    }

    const Options& options() const { return o_; }
    const McConfig& mc() const { return mc_; }
    const EnumerationConfig& cfg() const { return cfg_; }
    std::ostream& out() { return out_; }
    /// Human-readable summaries; stdout stays a clean JSON stream.
    std::ostream& err() { return err_; }

private:
    static void write(const std::string& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw LookupError("cannot write " + path);
        f << text;
        if (!f) throw LookupError("cannot write " + path);
    }

    const Options& o_;
    std::ostream& out_;
    std::ostream& err_;
    AnalysisReport report_;
    McConfig mc_;
    EnumerationConfig cfg_;
    std::chrono::steady_clock::time_point started_ = std::chrono::steady_clock::now();
};

int cmd_validate(Session& s) {
    const auto m = s.mdp();
    const auto violations = validate(m);
    Json r;
    r["valid"] = violations.empty();
    r["num_states"] = m.num_states();
    r["violations"] = violations;
    for (const auto& v : violations) s.err() << "violation: " << v << "\n";
    return s.finish(std::move(r), {}, false, violations.empty() ? kExitOk : kExitDomain);
}

int cmd_power(Session& s) {
    const auto m = s.mdp();
    const StateId st = s.state(m, s.options().state, "--state");
    const auto spec = s.dist();
    const auto grid = s.gammas();
    Json estimates = Json::array();
    std::vector<CsvRow> rows;
    for (double g : grid) {
        const auto e = power_any(m, st, g, spec, s.mc(), s.cfg());
        estimates.push_back(to_json(e));
        rows.push_back({g, "POWER(" + m.state_name(st) + ")", e.estimate, e.std_error});
    }
    return s.finish({{"state", m.state_name(st)}, {"estimates", std::move(estimates)}}, rows, grid.size() > 1);
}

int cmd_optprob(Session& s) {
    const auto m = s.mdp();
    const StateId st = s.state(m, s.options().state, "--state");
    const auto spec = s.dist();
    const auto grid = s.gammas();
    const auto fnd = nondominated_functions(enumerate_visit_dists(m, st, s.cfg()));

    std::vector<Target> targets;
    std::vector<std::string> names;
    const bool by_action = !s.options().actions.empty();
    if (by_action) {
        const StateId at = s.state(m, s.options().at_state, "--at-state");
        for (const auto& a : split(s.options().actions, ',')) {
            targets.push_back(restrict_by_action(m, fnd, at, m.action_id(at, a)));
            names.push_back(m.state_name(at) + ":" + a);
        }
    } else {
        for (std::size_t i = 0; i < fnd.size(); ++i) {
            targets.push_back({i});
            names.push_back("f" + std::to_string(i));
        }
    }

    Json per_gamma = Json::array();
    std::vector<CsvRow> rows;
    for (double g : grid) {
        OptProbEstimate e;
        if (g >= 1.0) {
            if (by_action) {
                // f-level targets: answered at 0.99 and 0.999, not over RSD_nd.
                e = optprob_near1(fnd, targets, spec, s.mc());
                Json j = to_json(e);
                j["gamma"] = 1.0;
                j["evaluated_at"] = 0.999;
                j["targets"] = names;
                per_gamma.push_back(std::move(j));
                for (std::size_t t = 0; t < targets.size(); ++t)
                    rows.push_back({g, names[t], e.probabilities[t], e.std_errors[t]});
                continue;
            }
            const auto rsds = nondominated_rsds(m, st, s.cfg()).members;
            std::vector<Target> rt;
            for (std::size_t i = 0; i < rsds.size(); ++i) rt.push_back({i});
            e = optprob_gamma1(rsds, rt, spec, s.mc());
            Json j = to_json(e);
            j["rsds"] = to_json(m, rsds);
            per_gamma.push_back(std::move(j));
            for (std::size_t i = 0; i < rsds.size(); ++i)
                rows.push_back({g, "d" + std::to_string(i), e.probabilities[i], e.std_errors[i]});
            continue;
        }
        if (g <= 0.0) throw UsageError("optprob needs 0 < gamma <= 1");
        e = optprob(fnd, targets, g, spec, s.mc());
        Json j = to_json(e);
        j["targets"] = names;
        per_gamma.push_back(std::move(j));
        for (std::size_t t = 0; t < targets.size(); ++t)
            rows.push_back({g, names[t], e.probabilities[t], e.std_errors[t]});
    }
    Json fns = Json::array();
    for (const auto& f : fnd) fns.push_back(to_json(m, f.policy(), f.reached()));
    return s.finish({{"state", m.state_name(st)}, {"nondominated_policies", std::move(fns)}, {"estimates", per_gamma}},
                    rows, grid.size() > 1);
}

int cmd_nondom(Session& s) {
    const auto m = s.mdp();
    const StateId st = s.state(m, s.options().state, "--state");
    const auto grid = s.gammas();
    if (grid.size() != 1 || !(grid[0] > 0.0 && grid[0] < 1.0)) throw UsageError("nondom needs one gamma in (0, 1)");
    const auto fs = enumerate_visit_dists(m, st, s.cfg());
    const auto nd = nondominated_set(fs, grid[0]);
    Json r;
    r["state"] = m.state_name(st);
    r["num_functions"] = fs.size();
    r["nondominated"] = to_json(m, nd, fs);
    return s.finish(std::move(r), {}, false);
}

int cmd_rsd(Session& s) {
    const auto m = s.mdp();
    const StateId st = s.state(m, s.options().state, "--state");
    const auto analysis = nondominated_rsds(m, st, s.cfg());
    Json r;
    r["state"] = m.state_name(st);
    if (!s.options().nondominated_only) r["all"] = to_json(m, analysis.all);
    r["nondominated"] = to_json(m, analysis.members);
    r["members"] = analysis.nondominated.members;
    return s.finish(std::move(r), {}, false);
}

int cmd_shifts(Session& s) {
    const auto m = s.mdp();
    const StateId st = s.state(m, s.options().state, "--state");
    if (s.options().reward.empty()) throw UsageError("--reward is required");
    const auto reward = load_reward(s.options().reward, m);
    if (!(s.options().grid_step > 0.0 && s.options().grid_step < 0.5)) throw UsageError("--grid-step must be in (0, 0.5)");
    const auto fs = enumerate_visit_dists(m, st, s.cfg());
    const auto profile = detect_shifts(fs, reward, s.options().grid_step);
    Json r;
    r["state"] = m.state_name(st);
    Json fns = Json::array();
    for (const auto& f : fs) fns.push_back(to_json(m, f.policy(), f.reached()));
    r["functions"] = std::move(fns);
    r["profile"] = to_json(profile);
    try {
        const auto b = blackwell_set(fs, reward);
        r["blackwell"] = {{"signature", b.signature},
                          {"confirmed_at", b.confirmed_at},
                          {"confirmed_again_at", b.confirmed_again_at}};
    } catch (const Indeterminate& e) {
        r["blackwell"] = {{"indeterminate", e.what()}};
    }
    if (m.is_deterministic()) {
        const auto w = shift_possible(m, st);
        r["shift_possible"] = w.has_value();
        if (w)
            r["witness"] = {{"s1", m.state_name(w->s1)},
                            {"s1_prime", m.state_name(w->s1_prime)},
                            {"s2_prime", m.state_name(w->s2_prime)}};
    }
    return s.finish(std::move(r), {}, false);
}

/// RSD_nd members supported inside the named states.
std::vector<std::size_t> rsds_within(const RewardlessMdp& m, const std::vector<Rsd>& members, const std::string& list,
                                     const char* flag) {
    const auto names = split(list, ',');
    if (names.empty()) throw UsageError(std::string(flag) + " is required");
    StateSet allowed(m.num_states());
    for (const auto& n : names) allowed.insert(m.state_id(n));
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < members.size(); ++i) {
        bool inside = true;
        for (StateId u = 0; u < m.num_states(); ++u)
            if (members[i].distribution(static_cast<Eigen::Index>(u)) > kRsdTolerance && !allowed.contains(u))
                inside = false;
        if (inside) out.push_back(i);
    }
    return out;
}

int finish_verdict(Session& s, const RewardlessMdp& m, const TheoremVerdict& v) {
    s.err() << v.theorem << ": " << (v.holds ? "holds" : v.inconclusive ? "inconclusive" : "not confirmed");
    if (!v.failing_clause.empty()) s.err() << " (" << v.failing_clause << ")";
    s.err() << "\n";
    return s.finish(to_json(m, v), {}, false);
}

int cmd_graph_options(Session& s) {
    const auto m = s.mdp();
    const StateId st = s.state(m, s.options().state, "--state");
    const StateId at = s.state(m, s.options().at_state, "--at-state");
    const auto acts = split(s.options().actions, ',');
    if (acts.size() != 2) throw UsageError("--actions needs exactly two actions: a,a'");
    return finish_verdict(s, m,
                          check_graph_options(m, st, at, m.action_id(at, acts[0]), m.action_id(at, acts[1]), s.dist(),
                                              s.mc(), s.cfg()));
}

int cmd_rsd_sim(Session& s) {
    const auto m = s.mdp();
    const StateId st = s.state(m, s.options().state, "--state");
    const StateId other = s.state(m, s.options().other_state, "--other-state");
    return finish_verdict(s, m, check_rsd_sim_power(m, st, other, s.dist(), s.mc(), s.cfg()));
}

int cmd_rsd_ic(Session& s) {
    const auto m = s.mdp();
    const StateId st = s.state(m, s.options().state, "--state");
    const auto members = nondominated_rsds(m, st, s.cfg()).members;
    const auto d = rsds_within(m, members, s.options().d, "--d");
    const auto dp = rsds_within(m, members, s.options().d_prime, "--d-prime");
    return finish_verdict(s, m, check_rsd_ic(m, st, d, dp, s.dist(), s.mc(), s.cfg()));
}

int cmd_figures(Session& s) {
    const auto& id = s.options().figure;
    const auto bundle = run_figure(id, s.mc());
    for (const auto& i : bundle.items)
        s.err() << (i.pass ? "PASS " : "FAIL ") << i.name << ": observed " << i.observed << ", expected " << i.expected
                << " +- " << i.tolerance << "\n";
    return s.finish(bundle.to_json(), bundle.csv, true);
}

void add_common(CLI::App* sub, Options& o, bool needs_mdp = true) {
    if (needs_mdp) {
        sub->add_option("--mdp", o.mdp, "MDP JSON file")->required();
        sub->add_option("--state", o.state, "start state name");
    }
    sub->add_option("--gamma", o.gamma, "discount rate G or grid A:B:STEP");
    sub->add_option("--dist", o.dist, "reward distribution: uniform, pow:K or table:PATH");
    sub->add_option("--samples", o.samples, "Monte Carlo samples");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--max-policies", o.max_policies, "policy enumeration cap");
    sub->add_option("--threads", o.threads, "worker threads (0: POWER_MDP_THREADS or hardware)");
    sub->add_option("--out", o.out, "write the JSON report here instead of stdout");
    sub->add_option("--csv", o.csv, "write CSV rows here");
}

} // namespace

std::vector<double> parse_gamma_grid(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() == 1 && text.find(':') == std::string::npos) {
        const double g = parse_double(parts[0], "--gamma");
        if (!(g >= 0.0 && g <= 1.0)) throw InvalidArgument("--gamma must lie in [0, 1]");
        return {g};
    }
    if (parts.size() != 3) throw InvalidArgument("--gamma grid must be A:B:STEP");
    const double a = parse_double(parts[0], "--gamma start"), b = parse_double(parts[1], "--gamma end"),
                 step = parse_double(parts[2], "--gamma step");
    if (!(step > 0.0) || !(a >= 0.0) || !(b <= 1.0) || a > b) throw InvalidArgument("--gamma grid needs 0 <= A <= B <= 1, STEP > 0");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    if (count > 100000) throw InvalidArgument("--gamma grid has too many points");
    std::vector<double> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(std::min(b, a + static_cast<double>(k) * step));
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Analysis of rewardless MDPs: POWER, optimality probability, non-domination and policy shifts"};
    app.name("power_mdp");
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    auto* validate_cmd = app.add_subcommand("validate", "check an MDP file against its invariants");
    validate_cmd->add_option("--mdp", o.mdp, "MDP JSON file")->required();
    validate_cmd->add_option("--out", o.out, "write the JSON report here instead of stdout");

    auto* power_cmd = app.add_subcommand("power", "POWER at a state");
    add_common(power_cmd, o);

    auto* optprob_cmd = app.add_subcommand("optprob", "optimality probability of non-dominated targets");
    add_common(optprob_cmd, o);
    optprob_cmd->add_option("--at-state", o.at_state, "state at which --actions restrict the targets");
    optprob_cmd->add_option("--actions", o.actions, "comma-separated actions at --at-state, one target each");

    auto* nondom_cmd = app.add_subcommand("nondom", "non-dominated visit distribution functions");
    add_common(nondom_cmd, o);

    auto* rsd_cmd = app.add_subcommand("rsd", "recurrent state distributions");
    add_common(rsd_cmd, o);
    rsd_cmd->add_flag("--nondominated", o.nondominated_only, "list only RSD_nd");

    auto* shifts_cmd = app.add_subcommand("shifts", "optimal policy shifts for a fixed reward");
    add_common(shifts_cmd, o);
    shifts_cmd->add_option("--reward", o.reward, "reward JSON file")->required();
    shifts_cmd->add_option("--grid-step", o.grid_step, "scan grid spacing");

    auto* check_cmd = app.add_subcommand("check", "sufficient-condition checkers");
    check_cmd->require_subcommand(1);
    auto* go_cmd = check_cmd->add_subcommand("graph-options", "more options after a than after a'");
    add_common(go_cmd, o);
    go_cmd->add_option("--at-state", o.at_state, "state s' where a and a' are compared")->required();
    go_cmd->add_option("--actions", o.actions, "a,a'")->required();
    auto* sim_cmd = check_cmd->add_subcommand("rsd-sim", "RSD similarity implies more POWER as gamma -> 1");
    add_common(sim_cmd, o);
    sim_cmd->add_option("--other-state", o.other_state, "state s' compared with --state")->required();
    auto* ic_cmd = check_cmd->add_subcommand("rsd-ic", "more RSDs are more probably optimal as gamma -> 1");
    add_common(ic_cmd, o);
    ic_cmd->add_option("--d", o.d, "states supporting the RSDs in D")->required();
    ic_cmd->add_option("--d-prime", o.d_prime, "states supporting the RSDs in D'")->required();

    auto* figures_cmd = app.add_subcommand("figures", "regenerate a figure quantity from the bundled fixtures");
    add_common(figures_cmd, o, false);
    figures_cmd->add_option("id", o.figure, "figure id")->required()->check(CLI::IsMember(figure_ids()));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    std::vector<std::string> command{"power_mdp"};
    command.insert(command.end(), args.begin(), args.end());
    try {
        Session s(o, command, out, err);
        if (validate_cmd->parsed()) return cmd_validate(s);
        if (power_cmd->parsed()) return cmd_power(s);
        if (optprob_cmd->parsed()) return cmd_optprob(s);
        if (nondom_cmd->parsed()) return cmd_nondom(s);
        if (rsd_cmd->parsed()) return cmd_rsd(s);
        if (shifts_cmd->parsed()) return cmd_shifts(s);
        if (go_cmd->parsed()) return cmd_graph_options(s);
        if (sim_cmd->parsed()) return cmd_rsd_sim(s);
        if (ic_cmd->parsed()) return cmd_rsd_ic(s);
        if (figures_cmd->parsed()) return cmd_figures(s);
        err << "no subcommand\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const LookupError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

} // namespace powermdp::cli
