#pragma once

#include "powermdp/mdp.hpp"
#include "powermdp/montecarlo.hpp"
#include "powermdp/report.hpp"
#include "powermdp/visit.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace powermdp {

#ifdef POWERMDP_FIXTURE_DIR
inline const std::filesystem::path kFixtureDir = POWERMDP_FIXTURE_DIR;
#else
inline const std::filesystem::path kFixtureDir = "fixtures";
#endif

RewardlessMdp load_fixture(const std::string& name, const std::filesystem::path& dir = kFixtureDir);

/// Indices of the functions that visit `s` with positive weight.
std::vector<std::size_t> visiting(const std::vector<VisitDistFn>& fs, StateId s);

struct FigureItem {
    std::string name;
    double expected = 0.0;
    double tolerance = 0.0;
    double observed = 0.0;
    double std_error = 0.0;
    bool pass = false;
};

struct FigureBundle {
    std::string id;
    std::string description;
    std::vector<FigureItem> items;
    std::vector<CsvRow> csv;

    bool pass() const;
    Json to_json() const;
};

const std::vector<std::string>& figure_ids();

/// Regenerates one figure quantity from the bundled fixtures.
/// Throws LookupError for unknown ids.
FigureBundle run_figure(const std::string& id, const McConfig& mc, const std::filesystem::path& dir = kFixtureDir);

/// Smaller root of 0.1 + g^2 / (1 - g) = g, by bisection on (0, 0.3).
double thm53_root_oracle();

} // namespace powermdp
