#pragma once

#include "powermdp/mdp.hpp"
#include "powermdp/visit.hpp"

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace powermdp {

/// Optimal LP margins at or below this count as domination.
inline constexpr double kMarginThreshold = 1e-7;

/// Witness reward in [0,1]^S under which one candidate beats every other
/// candidate by at least `margin`.
struct StrictOptCertificate {
    Eigen::VectorXd witness;
    double margin = 0.0;
    double gamma = 0.0;
};

struct NondomEntry {
    std::size_t index = 0;
    bool included = false;
    /// Margin in rescaled coordinates; +inf when there is only one candidate.
    double margin = 0.0;
    std::optional<StrictOptCertificate> certificate;
    /// Non-empty when the LP failed; such candidates are reported, not dropped.
    std::string failure;
};

struct NondomResult {
    double gamma = 0.0;
    /// Indices of the included candidates, ascending.
    std::vector<std::size_t> members;
    std::vector<NondomEntry> entries;
};

/// Strict-optimality analysis over the columns of `candidates`: column i is
/// included iff  max_{0<=r<=1} min_{j!=i} (c_i - c_j)^T r  > kMarginThreshold,
/// with each state coordinate first rescaled to unit spread across the
/// candidates. Certificates are reported in the original coordinates.
NondomResult nondominated_columns(const Eigen::MatrixXd& candidates, double gamma_tag = 0.0);

/// F_nd(s) evaluated at gamma_check.
NondomResult nondominated_set(const std::vector<VisitDistFn>& fs, double gamma_check = 0.5);
NondomResult nondominated_set(const RewardlessMdp& mdp, StateId s, double gamma_check = 0.5,
                              const EnumerationConfig& cfg = {});

/// Convenience: the included functions themselves.
std::vector<VisitDistFn> nondominated_functions(const std::vector<VisitDistFn>& fs, double gamma_check = 0.5);

/// f_index(gamma)^T R exceeds every other member by more than kTieTolerance.
bool is_strictly_optimal_for(const std::vector<VisitDistFn>& fs, std::size_t index, const Eigen::VectorXd& reward,
                             double gamma);

/// Largest achievable margin for column `index` together with the maximizing reward.
struct MarginLp {
    double margin = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd reward;
    bool ok = false;
    std::string failure;
};
MarginLp strict_margin(const Eigen::MatrixXd& candidates, std::size_t index);

} // namespace powermdp
