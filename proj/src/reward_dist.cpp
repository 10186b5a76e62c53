#include "powermdp/reward_dist.hpp"

#include "powermdp/errors.hpp"
#include "powermdp/mdp_io.hpp"
#include "powermdp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace powermdp {

RewardDistSpec RewardDistSpec::uniform() { return {}; }

RewardDistSpec RewardDistSpec::power_cdf(double k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("pow:<k> requires a finite k > 0");
    RewardDistSpec out;
    out.kind_ = Kind::power_cdf;
    out.k_ = k;
    return out;
}

RewardDistSpec RewardDistSpec::table(std::vector<Knot> knots) {
    if (knots.size() < 2) throw InvalidArgument("table distribution needs at least two knots");
    if (knots.front().u != 0.0 || knots.back().u != 1.0)
        throw InvalidArgument("table knots must start at u=0 and end at u=1");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        const auto& k = knots[i];
        if (!(k.x >= 0.0 && k.x <= 1.0)) throw InvalidArgument("table knot value outside [0,1]");
        if (i > 0 && (k.u <= knots[i - 1].u || k.x < knots[i - 1].x))
            throw InvalidArgument("table knots must be strictly increasing in u and nondecreasing in x");
    }
    RewardDistSpec out;
    out.kind_ = Kind::table;
    out.knots_ = std::move(knots);
    return out;
}

std::vector<RewardDistSpec::Knot> parse_knots_csv(const std::string& text) {
    std::vector<RewardDistSpec::Knot> out;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double u = 0.0, x = 0.0;
        if (!(fields >> u >> x)) {
            if (first) {
                first = false;
                continue;
            }
            throw InvalidArgument("malformed knot line: " + line);
        }
        first = false;
        out.push_back({u, x});
    }
    return out;
}

RewardDistSpec RewardDistSpec::parse(const std::string& text) {
    if (text == "uniform") return uniform();
    if (text.rfind("pow:", 0) == 0) {
        const auto arg = text.substr(4);
        std::size_t used = 0;
        double k = 0.0;
        try {
            k = std::stod(arg, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("bad exponent in '" + text + "'");
        }
        if (used != arg.size()) throw InvalidArgument("bad exponent in '" + text + "'");
        return power_cdf(k);
    }
    if (text.rfind("table:", 0) == 0) {
        auto out = table(parse_knots_csv(read_text_file(text.substr(6))));
        out.source_ = text;
        return out;
    }
    throw InvalidArgument("unknown distribution '" + text + "' (expected uniform, pow:<k> or table:<path>)");
}

std::string RewardDistSpec::describe() const {
    switch (kind_) {
    case Kind::uniform:
        return "uniform";
    case Kind::power_cdf: {
        std::ostringstream os;
        os.precision(17);
        os << "pow:" << k_;
        return os.str();
    }
    case Kind::table:
        if (!source_.empty()) return source_;
        return "table:<inline " + std::to_string(knots_.size()) + " knots>";
    }
    return {};
}

double RewardDistSpec::inverse_cdf(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    switch (kind_) {
    case Kind::uniform:
        return u;
    case Kind::power_cdf:
        return std::pow(u, 1.0 / k_);
    case Kind::table: {
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), u,
                                         [](double v, const Knot& k) { return v < k.u; });
        if (it == knots_.end()) return knots_.back().x;
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        return lo.x + (hi.x - lo.x) * (u - lo.u) / (hi.u - lo.u);
    }
    }
    return u;
}

double RewardDistSpec::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    switch (kind_) {
    case Kind::uniform:
        return x;
    case Kind::power_cdf:
        return std::pow(x, k_);
    case Kind::table: {
        // Largest u with inverse_cdf(u) <= x.
        double best = 0.0;
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            const auto& lo = knots_[i - 1];
            const auto& hi = knots_[i];
            if (x >= hi.x) {
                best = hi.u;
            } else if (x >= lo.x && hi.x > lo.x) {
                best = std::max(best, lo.u + (hi.u - lo.u) * (x - lo.x) / (hi.x - lo.x));
            }
        }
        return best;
    }
    }
    return x;
}

double RewardDistSpec::mean() const { return expected_max_of(1); }

double RewardDistSpec::expected_max_of(std::size_t k) const {
    if (k == 0) throw InvalidArgument("expected_max_of needs k >= 1");
    const double kk = static_cast<double>(k);
    switch (kind_) {
    case Kind::uniform:
        return kk / (kk + 1.0);
    case Kind::power_cdf:
        return k_ * kk / (k_ * kk + 1.0);
    case Kind::table: {
        // The max of k draws is Q(U^{1/k}); with V = U^{1/k} (density k v^{k-1})
        // each linear piece Q(v) = a + b v integrates in closed form.
        double total = 0.0;
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            const auto& lo = knots_[i - 1];
            const auto& hi = knots_[i];
            const double b = (hi.x - lo.x) / (hi.u - lo.u);
            const double a = lo.x - b * lo.u;
            total += a * (std::pow(hi.u, kk) - std::pow(lo.u, kk)) +
                     b * kk / (kk + 1.0) * (std::pow(hi.u, kk + 1.0) - std::pow(lo.u, kk + 1.0));
        }
        return total;
    }
    }
    return 0.0;
}

void RewardDistSpec::draw(std::uint64_t seed, std::uint64_t index, Eigen::Ref<Eigen::VectorXd> out) const {
    const auto n = static_cast<std::uint64_t>(out.size());
    for (std::uint64_t s = 0; s < n; ++s)
        out(static_cast<Eigen::Index>(s)) = inverse_cdf(rng::uniform(seed, index, n, s));
}

Eigen::VectorXd RewardDistSpec::draw(std::uint64_t seed, std::uint64_t index, std::size_t num_states) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(num_states));
    draw(seed, index, out);
    return out;
}

} // namespace powermdp
