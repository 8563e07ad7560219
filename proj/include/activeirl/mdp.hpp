#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "activeirl/common.hpp"

namespace airl {

// ---------------------------------------------------------------------------
// Tabular MDP
// ---------------------------------------------------------------------------

enum GridAction : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kStay = 4 };
inline constexpr int kGridActions = 5;

struct Successor {
    int state;
    double prob;
};

/// Tabular MDP laid out on a grid (row-major, row 0 at the top). Non-grid
/// MDPs used in tests set height = 1 and fill `transitions` by hand.
struct GridMdp {
    int width = 0;
    int height = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<std::vector<Successor>> transitions;  // [s * num_actions + a]
    std::vector<std::uint8_t> terminal;
    std::vector<std::uint8_t> jail;
    std::vector<int> state_type;
    double gamma = 0.95;
    int step_cap = 15;

    const std::vector<Successor>& successors(int s, int a) const {
        return transitions[static_cast<std::size_t>(s) * num_actions + a];
    }
    std::vector<Successor>& successors(int s, int a) {
        return transitions[static_cast<std::size_t>(s) * num_actions + a];
    }
    bool is_terminal(int s) const { return terminal[s] != 0; }
    bool is_jail(int s) const { return jail[s] != 0; }
    int row(int s) const { return s / width; }
    int col(int s) const { return s % width; }
    int index(int r, int c) const { return r * width + c; }
    bool valid_state(int s) const { return s >= 0 && s < num_states; }
    bool valid_action(int a) const { return a >= 0 && a < num_actions; }

    int step(int s, int a, Rng& rng) const {
        const auto& succ = successors(s, a);
        if (succ.size() == 1) return succ.front().state;
        double u = uniform01(rng);
        for (const auto& n : succ) {
            u -= n.prob;
            if (u < 0.0) return n.state;
        }
        return succ.back().state;
    }

    std::vector<int> non_terminal_states() const {
        std::vector<int> out;
        for (int s = 0; s < num_states; ++s)
            if (!is_terminal(s)) out.push_back(s);
        return out;
    }

    /// Throws InputError if any transition row is not a distribution.
    void validate() const {
        if (num_states <= 0 || num_actions <= 0)
            throw InputError("MDP must have at least one state and one action");
        if (transitions.size() != static_cast<std::size_t>(num_states) * num_actions)
            throw InputError("transition table has wrong size");
        if (!(gamma > 0.0 && gamma < 1.0)) throw InputError("gamma must lie in (0, 1)");
        if (step_cap <= 0) throw InputError("step cap must be positive");
        for (int s = 0; s < num_states; ++s)
            for (int a = 0; a < num_actions; ++a) {
                double total = 0.0;
                for (const auto& n : successors(s, a)) {
                    if (!valid_state(n.state) || n.prob < 0.0)
                        throw InputError("invalid successor in transition table");
                    total += n.prob;
                }
                if (std::abs(total - 1.0) > 1e-9)
                    throw InputError("transition row does not sum to one");
            }
    }
};

/// Deterministic 5-action grid. Moves off the edge leave the state unchanged;
/// jail states map every action back to themselves.
inline GridMdp make_grid_mdp(int width, int height, std::vector<std::uint8_t> terminal,
                             std::vector<std::uint8_t> jail) {
    if (width <= 0 || height <= 0) throw InputError("grid dimensions must be positive");
    GridMdp m;
    m.width = width;
    m.height = height;
    m.num_states = width * height;
    m.num_actions = kGridActions;
    m.terminal = std::move(terminal);
    m.jail = std::move(jail);
    m.state_type.assign(m.num_states, 0);
    m.transitions.resize(static_cast<std::size_t>(m.num_states) * kGridActions);
    for (int s = 0; s < m.num_states; ++s) {
        const int r = m.row(s), c = m.col(s);
        for (int a = 0; a < kGridActions; ++a) {
            int nr = r, nc = c;
            if (!m.is_jail(s)) {
                switch (a) {
                    case kUp: nr = r - 1; break;
                    case kDown: nr = r + 1; break;
                    case kLeft: nc = c - 1; break;
                    case kRight: nc = c + 1; break;
                    default: break;
                }
                if (nr < 0 || nr >= height || nc < 0 || nc >= width) {
                    nr = r;
                    nc = c;
                }
            }
            m.successors(s, a) = {Successor{m.index(nr, nc), 1.0}};
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Rewards and priors
// ---------------------------------------------------------------------------

using Theta = std::vector<double>;

/// Maps a reward-parameter vector onto per-state rewards. States whose
/// parameter index is -1 carry a fixed known reward.
struct RewardMap {
    std::vector<int> param_of_state;
    std::vector<double> known_reward;
    std::vector<std::string> param_names;

    int num_params() const { return static_cast<int>(param_names.size()); }

    std::vector<double> state_rewards(std::span<const double> theta) const {
        if (theta.size() != param_names.size()) throw InputError("theta has wrong dimension");
        std::vector<double> r(param_of_state.size());
        for (std::size_t s = 0; s < r.size(); ++s)
            r[s] = param_of_state[s] >= 0 ? theta[param_of_state[s]] : known_reward[s];
        return r;
    }
};

/// Independent per-dimension prior: Uniform[a_i, b_i] or Normal(a_i, b_i^2).
struct Prior {
    enum class Kind { Uniform, Normal };
    Kind kind = Kind::Uniform;
    std::vector<double> a;
    std::vector<double> b;

    static Prior uniform(int dim, double lo, double hi) {
        return Prior{Kind::Uniform, std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
    }
    static Prior normal(int dim, double mean, double sd) {
        return Prior{Kind::Normal, std::vector<double>(dim, mean), std::vector<double>(dim, sd)};
    }

    int dim() const { return static_cast<int>(a.size()); }

    bool in_support(std::span<const double> theta) const {
        if (theta.size() != a.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!std::isfinite(theta[i])) return false;
            if (kind == Kind::Uniform && (theta[i] < a[i] || theta[i] > b[i])) return false;
        }
        return true;
    }

    double log_density(std::span<const double> theta) const {
        if (!in_support(theta)) return kNegInf;
        double lp = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (kind == Kind::Uniform) {
                lp -= std::log(b[i] - a[i]);
            } else {
                const double z = (theta[i] - a[i]) / b[i];
                lp += -0.5 * z * z - std::log(b[i]) - 0.5 * std::log(2.0 * M_PI);
            }
        }
        return lp;
    }

    Theta sample(Rng& rng) const {
        Theta t(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (kind == Kind::Uniform)
                t[i] = std::uniform_real_distribution<double>(a[i], b[i])(rng);
            else
                t[i] = std::normal_distribution<double>(a[i], b[i])(rng);
        }
        return t;
    }

    /// Differential entropy in nats.
    double entropy() const {
        double h = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            h += kind == Kind::Uniform ? std::log(b[i] - a[i])
                                       : 0.5 * std::log(2.0 * M_PI * M_E * b[i] * b[i]);
        return h;
    }

    /// Finite range used for grids and histograms (±4 sd for normals).
    double lower(int i) const { return kind == Kind::Uniform ? a[i] : a[i] - 4.0 * b[i]; }
    double upper(int i) const { return kind == Kind::Uniform ? b[i] : a[i] + 4.0 * b[i]; }
    double scale(int i) const { return upper(i) - lower(i); }
};

// ---------------------------------------------------------------------------
// Planning and policies
// ---------------------------------------------------------------------------

struct QFunction {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> q;

    double operator()(int s, int a) const { return q[static_cast<std::size_t>(s) * num_actions + a]; }
    double& operator()(int s, int a) { return q[static_cast<std::size_t>(s) * num_actions + a]; }
    std::span<const double> row(int s) const {
        return {q.data() + static_cast<std::size_t>(s) * num_actions,
                static_cast<std::size_t>(num_actions)};
    }
    double value(int s) const {
        const auto r = row(s);
        return *std::max_element(r.begin(), r.end());
    }
};

namespace detail {
inline void check_rewards(const GridMdp& mdp, std::span<const double> rewards) {
    if (rewards.size() != static_cast<std::size_t>(mdp.num_states))
        throw InputError("reward vector size does not match state count");
    for (double r : rewards)
        if (!std::isfinite(r)) throw InputError("rewards must be finite");
}
}  // namespace detail

/// Optimal Q under the reward-on-entry convention: V(s) = r(s) at terminals,
/// otherwise Q(s,a) = r(s) + gamma * E[V(s')]. Iterates until the sup-norm
/// change in V drops below `tol`. `warm_start` may seed the iteration.
inline QFunction value_iteration(const GridMdp& mdp, std::span<const double> rewards,
                                 double tol = 1e-6, const QFunction* warm_start = nullptr) {
    if (!(tol > 0.0)) throw InputError("value iteration tolerance must be positive");
    if (!(mdp.gamma < 1.0)) throw InputError("value iteration requires gamma < 1");
    detail::check_rewards(mdp, rewards);

    const int S = mdp.num_states, A = mdp.num_actions;
    std::vector<double> v(S), v_next(S);
    if (warm_start != nullptr && warm_start->num_states == S && warm_start->num_actions == A) {
        for (int s = 0; s < S; ++s) v[s] = mdp.is_terminal(s) ? rewards[s] : warm_start->value(s);
    } else {
        for (int s = 0; s < S; ++s) v[s] = mdp.is_terminal(s) ? rewards[s] : 0.0;
    }

    QFunction out{S, A, std::vector<double>(static_cast<std::size_t>(S) * A)};
    for (int iter = 0; iter < 1'000'000; ++iter) {
        double delta = 0.0;
        for (int s = 0; s < S; ++s) {
            if (mdp.is_terminal(s)) {
                v_next[s] = rewards[s];
                continue;
            }
            double best = kNegInf;
            for (int a = 0; a < A; ++a) {
                double ev = 0.0;
                for (const auto& n : mdp.successors(s, a)) ev += n.prob * v[n.state];
                best = std::max(best, rewards[s] + mdp.gamma * ev);
            }
            v_next[s] = best;
            delta = std::max(delta, std::abs(best - v[s]));
        }
        v.swap(v_next);
        if (delta < tol) break;
    }
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            if (mdp.is_terminal(s)) {
                out(s, a) = rewards[s];
                continue;
            }
            double ev = 0.0;
            for (const auto& n : mdp.successors(s, a)) ev += n.prob * v[n.state];
            out(s, a) = rewards[s] + mdp.gamma * ev;
        }
    }
    return out;
}

/// Sup-norm Bellman residual of `q` under the planner's convention.
inline double bellman_residual(const GridMdp& mdp, std::span<const double> rewards, const QFunction& q) {
    double worst = 0.0;
    for (int s = 0; s < mdp.num_states; ++s)
        for (int a = 0; a < mdp.num_actions; ++a) {
            double target = rewards[s];
            if (!mdp.is_terminal(s)) {
                double ev = 0.0;
                for (const auto& n : mdp.successors(s, a)) ev += n.prob * q.value(n.state);
                target += mdp.gamma * ev;
            }
            worst = std::max(worst, std::abs(target - q(s, a)));
        }
    return worst;
}

/// Stochastic policy table with cached log-probabilities.
struct Policy {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> prob;
    std::vector<double> log_prob;

    double p(int s, int a) const { return prob[static_cast<std::size_t>(s) * num_actions + a]; }
    double logp(int s, int a) const { return log_prob[static_cast<std::size_t>(s) * num_actions + a]; }
    std::span<const double> row(int s) const {
        return {prob.data() + static_cast<std::size_t>(s) * num_actions,
                static_cast<std::size_t>(num_actions)};
    }

    static Policy from_probabilities(int num_states, int num_actions, std::vector<double> probs) {
        Policy pi{num_states, num_actions, std::move(probs), {}};
        pi.log_prob.resize(pi.prob.size());
        for (std::size_t i = 0; i < pi.prob.size(); ++i)
            pi.log_prob[i] = pi.prob[i] > 0.0 ? std::log(pi.prob[i]) : kNegInf;
        return pi;
    }

    static Policy deterministic(int num_actions, std::span<const int> actions) {
        const int S = static_cast<int>(actions.size());
        std::vector<double> probs(static_cast<std::size_t>(S) * num_actions, 0.0);
        for (int s = 0; s < S; ++s) probs[static_cast<std::size_t>(s) * num_actions + actions[s]] = 1.0;
        return from_probabilities(S, num_actions, std::move(probs));
    }

    static Policy uniform(int num_states, int num_actions) {
        return from_probabilities(num_states, num_actions,
                                  std::vector<double>(static_cast<std::size_t>(num_states) * num_actions,
                                                      1.0 / num_actions));
    }

    double entropy(int s) const {
        double h = 0.0;
        for (int a = 0; a < num_actions; ++a) {
            const double pa = p(s, a);
            if (pa > 0.0) h -= pa * std::log(pa);
        }
        return h;
    }
};

/// Boltzmann-rational policy pi(a|s) proportional to exp(beta * Q(s,a)).
inline Policy boltzmann_policy(const QFunction& q, double beta) {
    if (!(beta >= 0.0)) throw InputError("beta must be non-negative");
    const int S = q.num_states, A = q.num_actions;
    Policy pi{S, A, std::vector<double>(q.q.size()), std::vector<double>(q.q.size())};
    for (int s = 0; s < S; ++s) {
        const auto row = q.row(s);
        const double m = beta * *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (int a = 0; a < A; ++a) z += std::exp(beta * row[a] - m);
        const double log_z = m + std::log(z);
        for (int a = 0; a < A; ++a) {
            const std::size_t i = static_cast<std::size_t>(s) * A + a;
            pi.log_prob[i] = beta * row[a] - log_z;
            pi.prob[i] = std::exp(pi.log_prob[i]);
        }
    }
    return pi;
}

/// Deterministic greedy policy; ties go to the lowest action index.
inline std::vector<int> greedy_actions(const QFunction& q) {
    std::vector<int> acts(q.num_states);
    for (int s = 0; s < q.num_states; ++s) {
        const auto row = q.row(s);
        acts[s] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return acts;
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

struct TrajectoryStep {
    int state;
    int action;
    bool operator==(const TrajectoryStep&) const = default;
};

struct Trajectory {
    int xi = 0;
    std::vector<TrajectoryStep> steps;
    bool terminated = false;

    std::size_t size() const { return steps.size(); }
    bool operator==(const Trajectory&) const = default;
};

/// Rolls `policy` forward from `xi` until a terminal state is entered or `cap`
/// steps have been recorded. The entered terminal state is not recorded.
inline Trajectory sample_trajectory(const GridMdp& mdp, const Policy& policy, int xi, int cap, Rng& rng) {
    if (!mdp.valid_state(xi)) throw InputError("start state out of range");
    if (mdp.is_terminal(xi)) throw InputError("cannot start a trajectory in a terminal state");
    if (cap <= 0) throw InputError("trajectory cap must be positive");
    Trajectory t;
    t.xi = xi;
    t.steps.reserve(cap);
    int s = xi;
    for (int step = 0; step < cap; ++step) {
        const int a = static_cast<int>(sample_discrete(policy.row(s), rng));
        t.steps.push_back({s, a});
        s = mdp.step(s, a, rng);
        if (mdp.is_terminal(s)) {
            t.terminated = true;
            break;
        }
    }
    return t;
}

/// Sum of log pi(a_t|s_t). Transition terms are omitted since they do not
/// depend on the reward. Returns -inf if some action has zero probability.
inline double trajectory_log_likelihood(const Trajectory& traj, const Policy& policy) {
    double ll = 0.0;
    for (const auto& st : traj.steps) ll += policy.logp(st.state, st.action);
    return ll;
}

/// Exact policy evaluation: V = r at terminals, V(s) = r(s) + gamma * E_pi[V(s')].
inline std::vector<double> policy_values(const GridMdp& mdp, const Policy& policy,
                                         std::span<const double> rewards) {
    detail::check_rewards(mdp, rewards);
    const int S = mdp.num_states;
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(S, S);
    Eigen::VectorXd rhs(S);
    for (int s = 0; s < S; ++s) {
        rhs(s) = rewards[s];
        if (mdp.is_terminal(s)) continue;
        for (int a = 0; a < mdp.num_actions; ++a) {
            const double pa = policy.p(s, a);
            if (pa == 0.0) continue;
            for (const auto& n : mdp.successors(s, a)) lhs(s, n.state) -= mdp.gamma * pa * n.prob;
        }
    }
    const Eigen::VectorXd v = lhs.partialPivLu().solve(rhs);
    return {v.data(), v.data() + S};
}

inline double expected_return(const GridMdp& mdp, const Policy& policy, std::span<const double> rewards,
                              std::span<const double> initial_distribution) {
    if (initial_distribution.size() != static_cast<std::size_t>(mdp.num_states))
        throw InputError("initial distribution size does not match state count");
    const auto v = policy_values(mdp, policy, rewards);
    double ret = 0.0;
    for (int s = 0; s < mdp.num_states; ++s) ret += initial_distribution[s] * v[s];
    return ret;
}

}  // namespace airl
