#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "activeirl/mdp.hpp"

namespace airl {

/// Cell codes used by layout files.
enum class CellType : char { Path = 'P', Goal = 'G', Jail = 'J', Mud = 'M', Water = 'W', Lava = 'L' };

struct GridLayout {
    int width = 0;
    int height = 0;
    std::vector<CellType> cells;  // row-major

    CellType at(int r, int c) const { return cells[static_cast<std::size_t>(r) * width + c]; }

    std::string to_string() const {
        std::string out;
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) out.push_back(static_cast<char>(at(r, c)));
            out.push_back('\n');
        }
        return out;
    }
};

/// Parses a plain-text layout: one character per cell, rows separated by
/// newlines. Blank lines and trailing whitespace are ignored.
inline GridLayout parse_layout(std::string_view text) {
    GridLayout layout;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        if (line.empty()) continue;
        if (layout.width == 0) layout.width = static_cast<int>(line.size());
        if (static_cast<int>(line.size()) != layout.width)
            throw ConfigError("layout rows have inconsistent widths");
        for (char ch : line) {
            switch (ch) {
                case 'P': case 'G': case 'J': case 'M': case 'W': case 'L':
                    layout.cells.push_back(static_cast<CellType>(ch));
                    break;
                default:
                    throw ConfigError(std::string("unknown layout cell '") + ch + "'");
            }
        }
        ++layout.height;
    }
    if (layout.cells.empty()) throw ConfigError("layout is empty");
    if (std::none_of(layout.cells.begin(), layout.cells.end(), [](CellType t) { return t == CellType::Goal; }))
        throw ConfigError("layout has no goal cell");
    return layout;
}

inline GridLayout load_layout(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open layout file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_layout(buf.str());
}

/// The bundled 6x6 layout (also shipped as data/layouts/structured_6x6.txt).
inline constexpr std::string_view kStructuredLayoutText =
    "PPPMMG\n"
    "PWWMMP\n"
    "PWWPLP\n"
    "MPPPLL\n"
    "MMPLLP\n"
    "JPPLPP\n";

inline GridLayout default_structured_layout() { return parse_layout(kStructuredLayoutText); }

/// Scales the bundled layout to n x n by nearest-cell lookup. The jail stays
/// in the bottom-left corner and the goal in the top-right corner.
inline GridLayout scaled_structured_layout(int n) {
    if (n < 2) throw InputError("scaled layout needs n >= 2");
    const GridLayout base = default_structured_layout();
    GridLayout out{n, n, {}};
    out.cells.reserve(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            CellType t = base.at(r * base.height / n, c * base.width / n);
            if (t == CellType::Jail || t == CellType::Goal) t = CellType::Path;
            if (r == n - 1 && c == 0) t = CellType::Jail;
            if (r == 0 && c == n - 1) t = CellType::Goal;
            out.cells.push_back(t);
        }
    return out;
}

/// A ready-to-use experiment environment.
struct Environment {
    std::string name;
    GridMdp mdp;
    RewardMap reward_map;
    Prior prior;
    Theta true_theta;
    std::vector<char> cell_codes;  // one display character per state

    std::vector<double> true_rewards() const { return reward_map.state_rewards(true_theta); }
};

struct StructuredOptions {
    GridLayout layout = default_structured_layout();
    double gamma = 0.95;
    int step_cap = 15;
    double prior_lo = -100.0;
    double prior_hi = 0.0;
    double path_reward = -1.0;
    double goal_reward = 100.0;
    double jail_reward = -1.0;
};

/// Structured gridworld: path/goal/jail rewards are known, mud, water and lava
/// are the three unknown parameters. The true parameters are drawn from the
/// prior using `reward_seed`.
inline Environment make_structured_gridworld(std::uint64_t reward_seed = 0,
                                             const StructuredOptions& opt = {}) {
    const GridLayout& lay = opt.layout;
    const int S = lay.width * lay.height;
    std::vector<std::uint8_t> terminal(S, 0), jail(S, 0);
    for (int s = 0; s < S; ++s) {
        terminal[s] = lay.cells[s] == CellType::Goal;
        jail[s] = lay.cells[s] == CellType::Jail;
    }
    Environment env;
    env.name = "structured";
    env.mdp = make_grid_mdp(lay.width, lay.height, std::move(terminal), std::move(jail));
    env.mdp.gamma = opt.gamma;
    env.mdp.step_cap = opt.step_cap;

    RewardMap& rm = env.reward_map;
    rm.param_names = {"mud", "water", "lava"};
    rm.param_of_state.assign(S, -1);
    rm.known_reward.assign(S, 0.0);
    env.cell_codes.resize(S);
    for (int s = 0; s < S; ++s) {
        const CellType t = lay.cells[s];
        env.cell_codes[s] = static_cast<char>(t);
        switch (t) {
            case CellType::Path: rm.known_reward[s] = opt.path_reward; break;
            case CellType::Goal: rm.known_reward[s] = opt.goal_reward; break;
            case CellType::Jail: rm.known_reward[s] = opt.jail_reward; break;
            case CellType::Mud: rm.param_of_state[s] = 0; break;
            case CellType::Water: rm.param_of_state[s] = 1; break;
            case CellType::Lava: rm.param_of_state[s] = 2; break;
        }
        env.mdp.state_type[s] = static_cast<int>(t);
    }
    env.prior = Prior::uniform(3, opt.prior_lo, opt.prior_hi);
    Rng rng = make_rng(reward_seed, 0x5eed);
    env.true_theta = env.prior.sample(rng);
    env.mdp.validate();
    return env;
}

struct RandomOptions {
    int size = 7;
    double reward_scale = 3.0;
    bool scale_is_variance = false;  // N(0, 3): 3 read as std dev unless set
    double terminal_prob = 0.1;
    double terminal_quantile = 0.9;
    double gamma = 0.95;
    int step_cap = 10;
};

/// Empirical quantile with linear interpolation between order statistics.
inline double empirical_quantile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

/// Fully random gridworld: one Normal reward per state, random terminals plus
/// every state whose reward exceeds the empirical terminal quantile.
inline Environment make_random_gridworld(std::uint64_t seed, const RandomOptions& opt = {}) {
    const int n = opt.size, S = n * n;
    const double sd = opt.scale_is_variance ? std::sqrt(opt.reward_scale) : opt.reward_scale;
    Rng rng = make_rng(seed, 0xa11d);
    std::normal_distribution<double> reward_dist(0.0, sd);
    Theta rewards(S);
    for (auto& r : rewards) r = reward_dist(rng);
    std::vector<std::uint8_t> terminal(S, 0);
    for (int s = 0; s < S; ++s) terminal[s] = uniform01(rng) < opt.terminal_prob;
    const double cut = empirical_quantile(rewards, opt.terminal_quantile);
    for (int s = 0; s < S; ++s)
        if (rewards[s] > cut) terminal[s] = 1;
    if (std::all_of(terminal.begin(), terminal.end(), [](auto t) { return t != 0; })) terminal[0] = 0;

    Environment env;
    env.name = "random";
    env.mdp = make_grid_mdp(n, n, std::move(terminal), std::vector<std::uint8_t>(S, 0));
    env.mdp.gamma = opt.gamma;
    env.mdp.step_cap = opt.step_cap;
    env.reward_map.param_of_state.resize(S);
    std::iota(env.reward_map.param_of_state.begin(), env.reward_map.param_of_state.end(), 0);
    env.reward_map.known_reward.assign(S, 0.0);
    for (int s = 0; s < S; ++s) env.reward_map.param_names.push_back("r" + std::to_string(s));
    for (int s = 0; s < S; ++s) env.mdp.state_type[s] = s;
    env.prior = Prior::normal(S, 0.0, sd);
    env.true_theta = std::move(rewards);
    env.cell_codes.assign(S, 'P');
    for (int s = 0; s < S; ++s)
        if (env.mdp.is_terminal(s)) env.cell_codes[s] = 'G';
    env.mdp.validate();
    return env;
}

/// First non-terminal state in row-major order (the top-left corner when it
/// is not terminal).
inline int top_left_start(const GridMdp& mdp) {
    for (int s = 0; s < mdp.num_states; ++s)
        if (!mdp.is_terminal(s)) return s;
    throw InputError("MDP has no non-terminal state");
}

}  // namespace airl
