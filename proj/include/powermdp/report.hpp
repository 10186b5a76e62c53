#pragma once

#include "powermdp/mdp.hpp"
#include "powermdp/nondom.hpp"
#include "powermdp/optprob.hpp"
#include "powermdp/power.hpp"
#include "powermdp/rsd.hpp"
#include "powermdp/shifts.hpp"
#include "powermdp/theorems.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace powermdp {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Result bundle written by every CLI command.
struct AnalysisReport {
    std::vector<std::string> command;
    Json config = Json::object();
    Json results = Json::object();
    std::string tool_version = kToolVersion;
    double wall_clock_seconds = 0.0;

    Json to_json() const;
    static AnalysisReport from_json(const Json& j);
    std::string dump() const;

    friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

/// Non-finite doubles become null.
Json number(double x);

Json to_json(const Eigen::VectorXd& v);
Json to_json(const RewardlessMdp& mdp, const Eigen::VectorXd& v);
Json to_json(const RewardlessMdp& mdp, const Policy& pi, const StateSet& states = {});
Json to_json(const PowerEstimate& e);
Json to_json(const OptProbEstimate& e);
Json to_json(const RewardlessMdp& mdp, const NondomResult& r, const std::vector<VisitDistFn>& fs);
Json to_json(const RewardlessMdp& mdp, const std::vector<Rsd>& rsds);
Json to_json(const ShiftProfile& p);
Json to_json(const RewardlessMdp& mdp, const TheoremVerdict& v);
Json to_json(const RewardlessMdp& mdp, const BottleneckResult& b);

/// One CSV line per row: gamma,target,estimate,stderr.
struct CsvRow {
    double gamma;
    std::string target;
    double estimate;
    double std_error;
};
std::string to_csv(const std::vector<CsvRow>& rows);

} // namespace powermdp
