#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace powermdp {

/// Continuous reward distribution on [0,1], applied IID across states.
class RewardDistSpec {
public:
    enum class Kind { uniform, power_cdf, table };

    struct Knot {
        double u;
        double x;
    };

    static RewardDistSpec uniform();
    /// CDF x^k on [0,1]; k > 0.
    static RewardDistSpec power_cdf(double k);
    /// Piecewise-linear inverse CDF through (u, x) knots. Knots must start at
    /// u=0, end at u=1, and be nondecreasing in both coordinates within [0,1].
    static RewardDistSpec table(std::vector<Knot> knots);

    /// Parses "uniform", "pow:<k>" or "table:<path>" (two-column CSV u,x).
    static RewardDistSpec parse(const std::string& text);

    Kind kind() const noexcept { return kind_; }
    double exponent() const noexcept { return k_; }
    const std::vector<Knot>& knots() const noexcept { return knots_; }
    /// Canonical text form accepted by parse() (tables print inline knots).
    std::string describe() const;

    double inverse_cdf(double u) const;
    double cdf(double x) const;
    double mean() const;
    /// E[max of k IID draws].
    double expected_max_of(std::size_t k) const;

    /// Reward vector for sample `index` of stream `seed`.
    void draw(std::uint64_t seed, std::uint64_t index, Eigen::Ref<Eigen::VectorXd> out) const;
    Eigen::VectorXd draw(std::uint64_t seed, std::uint64_t index, std::size_t num_states) const;

private:
    Kind kind_ = Kind::uniform;
    double k_ = 1.0;
    std::vector<Knot> knots_;
    std::string source_;
};

/// Parses two-column CSV text of (u, x) knots; a non-numeric first line is a header.
std::vector<RewardDistSpec::Knot> parse_knots_csv(const std::string& text);

} // namespace powermdp
