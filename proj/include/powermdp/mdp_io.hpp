#pragma once

#include "powermdp/mdp.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>

namespace powermdp {

/// Parses the MDP JSON format:
///   {"states": ["s1", ...], "actions": {"s1": {"up": {"s2": 1.0}, ...}, ...}}
/// Action order follows the file. Omitted targets have probability zero.
/// Structural problems (unknown targets, bad rows) are kept for validate();
/// malformed JSON throws InvalidArgument.
RewardlessMdp parse_mdp(const std::string& text);
RewardlessMdp load_mdp(const std::filesystem::path& path);
std::string dump_mdp(const RewardlessMdp& mdp);

/// Reward file: {"state": value, ...}. States that are not listed get 0.
/// Values are unrestricted reals.
Eigen::VectorXd parse_reward(const std::string& text, const RewardlessMdp& mdp);
Eigen::VectorXd load_reward(const std::filesystem::path& path, const RewardlessMdp& mdp);

std::string read_text_file(const std::filesystem::path& path);

} // namespace powermdp
