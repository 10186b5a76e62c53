#include "powermdp/mdp_io.hpp"

#include "powermdp/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <limits>
#include <sstream>

namespace powermdp {

using ordered_json = nlohmann::ordered_json;

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LookupError("cannot read file " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RewardlessMdp parse_mdp(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw InvalidArgument(std::string("MDP JSON parse error: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("states") || !doc["states"].is_array())
        throw InvalidArgument("MDP JSON needs a \"states\" array");
    if (!doc.contains("actions") || !doc["actions"].is_object())
        throw InvalidArgument("MDP JSON needs an \"actions\" object");

    std::vector<RewardlessMdp::State> states;
    for (const auto& name : doc["states"]) {
        if (!name.is_string()) throw InvalidArgument("state names must be strings");
        states.push_back({name.get<std::string>(), {}});
    }
    auto find = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i].name == name) return i;
        return std::numeric_limits<std::size_t>::max();
    };

    for (const auto& [sname, acts] : doc["actions"].items()) {
        const auto s = find(sname);
        if (s == std::numeric_limits<std::size_t>::max())
            throw InvalidArgument("actions listed for undeclared state '" + sname + "'");
        if (!acts.is_object()) throw InvalidArgument("actions of '" + sname + "' must be an object");
        for (const auto& [aname, targets] : acts.items()) {
            if (!targets.is_object())
                throw InvalidArgument("row (" + sname + "," + aname + ") must be an object");
            SparseRow row;
            for (const auto& [tname, p] : targets.items()) {
                if (!p.is_number()) throw InvalidArgument("probability for " + tname + " must be a number");
                const auto t = find(tname);
                if (t == std::numeric_limits<std::size_t>::max())
                    throw InvalidArgument("row (" + sname + "," + aname + ") targets unknown state '" + tname + "'");
                row.push_back({t, p.get<double>()});
            }
            states[s].actions.push_back({aname, std::move(row)});
        }
    }
    return RewardlessMdp(std::move(states));
}

RewardlessMdp load_mdp(const std::filesystem::path& path) { return parse_mdp(read_text_file(path)); }

std::string dump_mdp(const RewardlessMdp& mdp) {
    ordered_json doc;
    doc["states"] = ordered_json::array();
    for (const auto& st : mdp.states()) doc["states"].push_back(st.name);
    doc["actions"] = ordered_json::object();
    for (const auto& st : mdp.states()) {
        ordered_json acts = ordered_json::object();
        for (const auto& act : st.actions) {
            ordered_json row = ordered_json::object();
            for (const auto& t : act.row) row[mdp.state_name(t.target)] = t.probability;
            acts[act.name] = row;
        }
        doc["actions"][st.name] = acts;
    }
    return doc.dump(2);
}

Eigen::VectorXd parse_reward(const std::string& text, const RewardlessMdp& mdp) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw InvalidArgument(std::string("reward JSON parse error: ") + e.what());
    }
    if (!doc.is_object()) throw InvalidArgument("reward JSON must map state names to numbers");
    Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mdp.num_states()));
    for (const auto& [name, v] : doc.items()) {
        if (!v.is_number()) throw InvalidArgument("reward for '" + name + "' must be a number");
        r(static_cast<Eigen::Index>(mdp.state_id(name))) = v.get<double>();
    }
    return r;
}

Eigen::VectorXd load_reward(const std::filesystem::path& path, const RewardlessMdp& mdp) {
    return parse_reward(read_text_file(path), mdp);
}

} // namespace powermdp
