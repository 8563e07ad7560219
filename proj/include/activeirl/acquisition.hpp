#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "activeirl/bayes_irl.hpp"
#include "activeirl/knn_entropy.hpp"
#include "activeirl/mdp.hpp"

namespace airl {

struct EIGConfig {
    int n_rewards = 20;
    int n_trajectories = 2;
    int step_cap = 15;
    double beta = 1.0;
    std::uint64_t seed = 0;
    unsigned jobs = 1;

    void validate() const {
        if (n_rewards < 2) throw InputError("EIG needs at least 2 reward samples");
        if (n_trajectories < 1) throw InputError("EIG needs at least 1 trajectory per reward");
        if (step_cap < 1) throw InputError("step cap must be positive");
    }
};

struct CandidateScore {
    int state = 0;
    double score = 0.0;
    int n_samples = 0;
    double std_error = 0.0;
};

struct AcquisitionResult {
    int chosen = -1;
    std::vector<CandidateScore> scores;
    double wall_time_s = 0.0;
    std::vector<std::string> warnings;

    const CandidateScore* find(int state) const {
        for (const auto& c : scores)
            if (c.state == state) return &c;
        return nullptr;
    }
    long total_samples() const {
        long n = 0;
        for (const auto& c : scores) n += c.n_samples;
        return n;
    }
};

/// Index into `scores` of the maximal score; ties go to the lowest state.
inline int argmax_state(const std::vector<CandidateScore>& scores) {
    int best = -1;
    double best_score = kNegInf;
    for (const auto& c : scores) {
        if (best < 0 || c.score > best_score || (c.score == best_score && c.state < best)) {
            best = c.state;
            best_score = c.score;
        }
    }
    return best;
}

/// The `n` best-scoring states (ties by lowest index). Repeats the best state
/// if fewer than `n` candidates exist.
inline std::vector<int> top_states(const AcquisitionResult& res, int n) {
    auto sorted = res.scores;
    std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
        return x.score > y.score || (x.score == y.score && x.state < y.state);
    });
    std::vector<int> out;
    for (int i = 0; i < n && !sorted.empty(); ++i)
        out.push_back(sorted[std::min<std::size_t>(i, sorted.size() - 1)].state);
    if (static_cast<int>(sorted.size()) < n)
        for (auto& s : out) s = sorted.front().state;
    return out;
}

inline std::vector<Policy> boltzmann_policies(const PosteriorSampleSet& posterior, double beta) {
    if (!posterior.has_q_cache()) throw InputError("posterior sample set has no cached Q functions");
    std::vector<Policy> out;
    out.reserve(posterior.size());
    for (const auto& q : posterior.q_cache) out.push_back(boltzmann_policy(*q, beta));
    return out;
}

namespace detail {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Draws `n` indices from [0, size): without replacement when n <= size.
inline std::vector<int> draw_indices(int size, int n, Rng& rng) {
    std::vector<int> idx;
    if (n <= size) {
        std::vector<int> all(size);
        std::iota(all.begin(), all.end(), 0);
        for (int i = 0; i < n; ++i) {
            const int j = i + static_cast<int>(uniform_index(rng, size - i));
            std::swap(all[i], all[j]);
            idx.push_back(all[i]);
        }
    } else {
        for (int i = 0; i < n; ++i) idx.push_back(static_cast<int>(uniform_index(rng, size)));
    }
    return idx;
}

inline std::vector<int> valid_candidates(const GridMdp& mdp, const std::vector<int>& candidates,
                                         std::vector<std::string>& warnings) {
    std::vector<int> out;
    for (int s : candidates) {
        if (!mdp.valid_state(s)) throw InputError("candidate state out of range");
        if (mdp.is_terminal(s)) {
            warnings.push_back("skipped terminal candidate " + std::to_string(s));
            spdlog::warn("acquisition: skipping terminal candidate {}", s);
            continue;
        }
        out.push_back(s);
    }
    return out;
}

/// Generates per-trajectory information-gain observations for one start
/// state: each observation samples a trajectory under one of the drawn
/// rewards and compares its likelihood with the mixture over all of them.
class InfoGainSampler {
public:
    InfoGainSampler(const GridMdp& mdp, const std::vector<Policy>& policies, int xi, int n_rewards, int cap,
                    Rng rng)
        : mdp_(mdp), policies_(policies), xi_(xi), cap_(cap), rng_(rng) {
        drawn_ = draw_indices(static_cast<int>(policies.size()), n_rewards, rng_);
        ll_.resize(drawn_.size());
    }

    /// Observation using the i-th drawn reward.
    double observe(int i) {
        const Trajectory tau = sample_trajectory(mdp_, policies_[drawn_[i]], xi_, cap_, rng_);
        for (std::size_t k = 0; k < drawn_.size(); ++k)
            ll_[k] = trajectory_log_likelihood(tau, policies_[drawn_[k]]);
        const double m = *std::max_element(ll_.begin(), ll_.end());
        double acc = 0.0;
        for (double v : ll_) acc += std::exp(v - m);
        return (ll_[i] - m) - std::log(acc / static_cast<double>(ll_.size()));
    }

    /// Round-robin over the drawn rewards.
    double observe_next() { return observe(static_cast<int>(next_++ % drawn_.size())); }

    int n_drawn() const { return static_cast<int>(drawn_.size()); }

private:
    const GridMdp& mdp_;
    const std::vector<Policy>& policies_;
    int xi_;
    int cap_;
    Rng rng_;
    std::vector<int> drawn_;
    std::vector<double> ll_;
    std::size_t next_ = 0;
};

inline void mean_and_se(std::span<const double> xs, double& mean, double& se) {
    mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    se = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size())) : 0.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Nested Monte Carlo EIG
// ---------------------------------------------------------------------------

/// Nested Monte Carlo EIG for each candidate start state. Candidate c uses
/// the random stream (cfg.seed, c), so results do not depend on scheduling.
inline AcquisitionResult eig_nmc(const std::vector<int>& candidates, const PosteriorSampleSet& posterior,
                                 const GridMdp& mdp, const EIGConfig& cfg) {
    cfg.validate();
    if (posterior.empty()) throw InputError("posterior sample set is empty");
    detail::Stopwatch clock;
    AcquisitionResult res;
    const auto cands = detail::valid_candidates(mdp, candidates, res.warnings);
    const auto policies = boltzmann_policies(posterior, cfg.beta);
    res.scores.resize(cands.size());
    parallel_for(cands.size(), cfg.jobs, [&](std::size_t c) {
        const int xi = cands[c];
        detail::InfoGainSampler sampler(mdp, policies, xi, cfg.n_rewards, cfg.step_cap,
                                        make_rng(cfg.seed, static_cast<std::uint64_t>(xi)));
        std::vector<double> obs;
        obs.reserve(static_cast<std::size_t>(sampler.n_drawn()) * cfg.n_trajectories);
        for (int i = 0; i < sampler.n_drawn(); ++i)
            for (int j = 0; j < cfg.n_trajectories; ++j) obs.push_back(sampler.observe(i));
        CandidateScore cs{xi, 0.0, static_cast<int>(obs.size()), 0.0};
        detail::mean_and_se(obs, cs.score, cs.std_error);
        res.scores[c] = cs;
    });
    res.chosen = argmax_state(res.scores);
    res.wall_time_s = clock.seconds();
    return res;
}

/// EIG from single-state queries: the nested estimator with unit-length
/// hypothetical trajectories.
inline AcquisitionResult single_state_eig(const std::vector<int>& candidates, const PosteriorSampleSet& posterior,
                                          const GridMdp& mdp, EIGConfig cfg) {
    cfg.step_cap = 1;
    return eig_nmc(candidates, posterior, mdp, cfg);
}

/// Exact mutual information between the reward and a trajectory from `xi`,
/// by enumerating every trajectory up to `cap` steps. Refuses when more than
/// `max_trajectories` would be enumerated.
inline double eig_exact_tiny(const GridMdp& mdp, int xi, int cap, const std::vector<Policy>& policies,
                             std::span<const double> weights, long max_trajectories = 1'000'000) {
    if (policies.empty() || policies.size() != weights.size())
        throw InputError("need one weight per policy");
    if (mdp.is_terminal(xi)) throw InputError("start state is terminal");
    const std::size_t K = policies.size();
    std::vector<double> log_w(K);
    for (std::size_t k = 0; k < K; ++k) log_w[k] = weights[k] > 0 ? std::log(weights[k]) : kNegInf;

    double mi = 0.0;
    long count = 0;
    std::vector<double> mix(K);
    // log_pol[k]: log prob of the action sequence under policy k;
    // log_trans: log prob of the state transitions (shared by all k).
    auto leaf = [&](const std::vector<double>& log_pol, double log_trans) {
        if (++count > max_trajectories) throw InputError("trajectory enumeration guard exceeded");
        for (std::size_t k = 0; k < K; ++k) mix[k] = log_w[k] + log_pol[k];
        const double log_marg = log_sum_exp(mix);
        for (std::size_t k = 0; k < K; ++k) {
            if (!std::isfinite(mix[k])) continue;
            const double p = std::exp(mix[k] + log_trans);
            mi += p * (log_pol[k] - log_marg);
        }
    };
    auto recurse = [&](auto&& self, int s, int depth, std::vector<double>& log_pol, double log_trans) -> void {
        for (int a = 0; a < mdp.num_actions; ++a) {
            std::vector<double> next = log_pol;
            bool any = false;
            for (std::size_t k = 0; k < K; ++k) {
                next[k] += policies[k].logp(s, a);
                any = any || std::isfinite(next[k] + log_w[k]);
            }
            if (!any) continue;
            if (depth + 1 == cap) {
                leaf(next, log_trans);
                continue;
            }
            // Terminal successors end the trajectory; others continue.
            double p_end = 0.0;
            for (const auto& n : mdp.successors(s, a)) {
                if (n.prob <= 0.0) continue;
                if (mdp.is_terminal(n.state))
                    p_end += n.prob;
                else
                    self(self, n.state, depth + 1, next, log_trans + std::log(n.prob));
            }
            if (p_end > 0.0) leaf(next, log_trans + std::log(p_end));
        }
    };
    std::vector<double> start(K, 0.0);
    recurse(recurse, xi, 0, start, 0.0);
    return mi;
}

/// Convenience overload: exact EIG for explicit reward parameters.
inline double eig_exact_tiny(const Environment& env, int xi, int cap, const std::vector<Theta>& thetas,
                             std::span<const double> weights, double beta) {
    std::vector<Policy> pols;
    for (const auto& t : thetas)
        pols.push_back(boltzmann_policy(value_iteration(env.mdp, env.reward_map.state_rewards(t)), beta));
    return eig_exact_tiny(env.mdp, xi, cap, pols, weights);
}

// ---------------------------------------------------------------------------
// Bayesian-optimisation (UCB) refinement
// ---------------------------------------------------------------------------

struct BOConfig {
    double mu_prior = 0.0;
    double sigma_prior = 2.0;
    double phi = 1.0;          // median of the log-normal noise prior
    double phi_log_sd = 1.0;
    double kappa = 3.0;
    int init_samples_per_state = 2;
    long total_budget = 0;     // 0: |candidates| * n_rewards * n_trajectories

    double noise_prior_mode() const { return phi * std::exp(-phi_log_sd * phi_log_sd); }
    double log_noise_prior(double eps) const {
        const double z = (std::log(eps) - std::log(phi)) / phi_log_sd;
        return -std::log(eps) - 0.5 * z * z - std::log(phi_log_sd * std::sqrt(2.0 * M_PI));
    }
};

/// Running statistics for one candidate.
struct BOEntry {
    int state = 0;
    double mu = 0.0;
    double sigma = 1.0;
    double eps = 1.0;
    int n = 0;
    double obs_mean = 0.0;  // running mean of the observations
    double obs_m2 = 0.0;    // sum of squared deviations from obs_mean
    bool eps_fitted = false;

    double eig_hat() const { return obs_mean; }
};

/// Posterior mean and std of the EIG given `n` observations averaging
/// `eig_hat` with noise `eps`.
inline std::pair<double, double> bo_posterior(double eig_hat, int n, double eps, const BOConfig& cfg) {
    const double prec = 1.0 / (cfg.sigma_prior * cfg.sigma_prior) + n / (eps * eps);
    const double mu = (cfg.mu_prior / (cfg.sigma_prior * cfg.sigma_prior) + n * eig_hat / (eps * eps)) / prec;
    return {mu, std::sqrt(1.0 / prec)};
}

/// Folds new observations into the entry and recomputes (mu, sigma) at the
/// entry's current noise level.
inline BOEntry bo_gaussian_update(BOEntry e, std::span<const double> observations, const BOConfig& cfg) {
    if (!(e.eps > 0.0)) throw InputError("noise level must be positive");
    for (double x : observations) {
        ++e.n;
        const double d = x - e.obs_mean;
        e.obs_mean += d / e.n;
        e.obs_m2 += d * (x - e.obs_mean);
    }
    std::tie(e.mu, e.sigma) = bo_posterior(e.obs_mean, e.n, e.eps, cfg);
    return e;
}

/// Log of the noise objective: log prior on eps plus the Gaussian likelihood
/// of the individual observations around the conditional mean mu_s(eps).
inline double bo_noise_objective(const BOEntry& e, double eps, const BOConfig& cfg) {
    const double mu = bo_posterior(e.obs_mean, e.n, eps, cfg).first;
    const double ss = e.obs_m2 + e.n * (e.obs_mean - mu) * (e.obs_mean - mu);
    return cfg.log_noise_prior(eps) - e.n * std::log(eps) - 0.5 * ss / (eps * eps) -
           0.5 * e.n * std::log(2.0 * M_PI);
}

namespace detail {

// First and second derivatives of bo_noise_objective with respect to
// u = log(eps).
inline std::pair<double, double> noise_objective_derivs(const BOEntry& e, double u, const BOConfig& cfg) {
    const double s2 = cfg.phi_log_sd * cfg.phi_log_sd;
    const double P = 1.0 / (cfg.sigma_prior * cfg.sigma_prior);
    const double E = std::exp(-2.0 * u);
    const double n = e.n;
    const double D = e.obs_mean - cfg.mu_prior;
    const double c = 0.5 * n * D * D * P * P;
    const double w = P + n * E;
    const double g1 = 0.5 * e.obs_m2 + c * (P - n * E) / (w * w * w);
    const double g2 = -c * n * (4.0 * P - 2.0 * n * E) / (w * w * w * w);
    const double d1 = -(n + 1.0) - (u - std::log(cfg.phi)) / s2 + 2.0 * E * g1;
    const double d2 = -1.0 / s2 - 4.0 * E * g1 - 4.0 * E * E * g2;
    return {d1, d2};
}

}  // namespace detail

/// MAP noise level over eps in [1e-4, 1e4]. Safeguarded Newton steps on
/// log eps start from the previous fit (or the moment estimate); if they do
/// not converge a coarse scan plus golden-section search takes over.
/// All-equal observations fall back to the prior mode.
inline double bo_noise_map_update(const BOEntry& e, const BOConfig& cfg, bool allow_newton = true) {
    if (e.n < 1) throw InputError("noise update needs at least one observation");
    if (e.obs_m2 <= 0.0) return cfg.noise_prior_mode();
    const double lo = std::log(1e-4), hi = std::log(1e4);
    auto f = [&](double u) { return bo_noise_objective(e, std::exp(u), cfg); };

    if (allow_newton) {
        double u = e.eps_fitted && e.eps > 0.0 ? std::log(e.eps) : 0.5 * std::log(e.obs_m2 / e.n);
        u = std::clamp(u, lo, hi);
        for (int it = 0; it < 30; ++it) {
            const auto [d1, d2] = detail::noise_objective_derivs(e, u, cfg);
            if (!(d2 < 0.0)) break;
            const double step = std::clamp(-d1 / d2, -1.0, 1.0);
            u = std::clamp(u + step, lo, hi);
            if (std::abs(step) < 1e-7) return std::exp(u);
        }
    }

    constexpr int kScan = 81;
    int best = 0;
    double best_val = kNegInf;
    for (int i = 0; i < kScan; ++i) {
        const double v = f(lo + (hi - lo) * i / (kScan - 1));
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    const double h = (hi - lo) / (kScan - 1);
    double a = lo + h * std::max(0, best - 1), b = lo + h * std::min(kScan - 1, best + 1);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-5) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    const double u = 0.5 * (a + b);
    return f(u) >= best_val ? std::exp(u) : std::exp(lo + h * best);
}

/// Index of the entry maximising mu + kappa * sigma (ties: lowest state).
inline std::size_t ucb_select(const std::vector<BOEntry>& entries, double kappa) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < entries.size(); ++i) {
        const double vi = entries[i].mu + kappa * entries[i].sigma;
        const double vb = entries[best].mu + kappa * entries[best].sigma;
        if (vi > vb || (vi == vb && entries[i].state < entries[best].state)) best = i;
    }
    return best;
}

/// Runs the UCB allocation loop and returns the final BO state.
inline std::vector<BOEntry> bo_ucb_run(const std::vector<int>& cands, const std::vector<Policy>& policies,
                                       const GridMdp& mdp, const EIGConfig& cfg, const BOConfig& bo,
                                       long budget) {
    std::vector<detail::InfoGainSampler> samplers;
    samplers.reserve(cands.size());
    for (int xi : cands)
        samplers.emplace_back(mdp, policies, xi, cfg.n_rewards, cfg.step_cap,
                              make_rng(cfg.seed, static_cast<std::uint64_t>(xi)));
    std::vector<BOEntry> entries(cands.size());
    auto observe = [&](std::size_t c, int count) {
        std::vector<double> obs(count);
        for (auto& o : obs) o = samplers[c].observe_next();
        entries[c] = bo_gaussian_update(entries[c], obs, bo);
        entries[c].eps = bo_noise_map_update(entries[c], bo);
        entries[c].eps_fitted = entries[c].obs_m2 > 0.0;
        std::tie(entries[c].mu, entries[c].sigma) = bo_posterior(entries[c].obs_mean, entries[c].n, entries[c].eps, bo);
    };
    long spent = 0;
    for (std::size_t c = 0; c < cands.size(); ++c) {
        entries[c].state = cands[c];
        entries[c].eps = bo.noise_prior_mode();
        entries[c].mu = bo.mu_prior;
        entries[c].sigma = bo.sigma_prior;
        observe(c, bo.init_samples_per_state);
        spent += bo.init_samples_per_state;
    }
    while (spent < budget) {
        observe(ucb_select(entries, bo.kappa), 1);
        ++spent;
    }
    return entries;
}

/// EIG estimation with UCB-driven allocation of hypothetical trajectories.
/// Returns argmax of the posterior EIG means; scores are those means.
inline AcquisitionResult bo_ucb_eig(const std::vector<int>& candidates, const PosteriorSampleSet& posterior,
                                    const GridMdp& mdp, const EIGConfig& cfg, const BOConfig& bo) {
    cfg.validate();
    if (posterior.empty()) throw InputError("posterior sample set is empty");
    if (bo.init_samples_per_state < 1) throw InputError("init_samples_per_state must be positive");
    detail::Stopwatch clock;
    AcquisitionResult res;
    const auto cands = detail::valid_candidates(mdp, candidates, res.warnings);
    if (cands.empty()) throw InputError("no valid candidates");
    const long budget = bo.total_budget > 0
                            ? bo.total_budget
                            : static_cast<long>(cands.size()) * cfg.n_rewards * cfg.n_trajectories;
    if (budget < static_cast<long>(bo.init_samples_per_state) * static_cast<long>(cands.size()))
        throw InputError("budget below init_samples_per_state * |candidates|");
    const auto policies = boltzmann_policies(posterior, cfg.beta);
    const auto entries = bo_ucb_run(cands, policies, mdp, cfg, bo, budget);
    for (const auto& e : entries) res.scores.push_back({e.state, e.mu, e.n, e.sigma});
    res.chosen = argmax_state(res.scores);
    res.wall_time_s = clock.seconds();
    return res;
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

/// Uniform random choice; all scores equal.
inline AcquisitionResult acq_random(const std::vector<int>& candidates, Rng& rng) {
    if (candidates.empty()) throw InputError("no candidates");
    AcquisitionResult res;
    for (int s : candidates) res.scores.push_back({s, 0.0, 0, 0.0});
    res.chosen = candidates[uniform_index(rng, candidates.size())];
    return res;
}

/// Joint kNN entropy of the posterior over Q(s0, .) for each candidate.
inline AcquisitionResult acq_q_entropy(const std::vector<int>& candidates, const PosteriorSampleSet& posterior,
                                       int k = 5) {
    if (!posterior.has_q_cache()) throw InputError("Q-entropy needs cached Q functions");
    detail::Stopwatch clock;
    AcquisitionResult res;
    const int A = posterior.q_cache.front()->num_actions;
    std::vector<double> pts(posterior.size() * A);
    for (int s : candidates) {
        for (std::size_t i = 0; i < posterior.size(); ++i) {
            const auto row = posterior.q_cache[i]->row(s);
            std::copy(row.begin(), row.end(), pts.begin() + static_cast<std::ptrdiff_t>(i * A));
        }
        const auto est = knn_entropy(pts, A, k);
        res.scores.push_back({s, est.nats, static_cast<int>(posterior.size()), 0.0});
    }
    res.chosen = argmax_state(res.scores);
    res.wall_time_s = clock.seconds();
    return res;
}

/// Posterior-mean Boltzmann policy over all samples.
inline Policy posterior_mean_policy(const PosteriorSampleSet& posterior, double beta) {
    const auto pols = boltzmann_policies(posterior, beta);
    std::vector<double> probs(pols.front().prob.size(), 0.0);
    for (const auto& p : pols)
        for (std::size_t i = 0; i < probs.size(); ++i) probs[i] += p.prob[i];
    for (auto& v : probs) v /= static_cast<double>(pols.size());
    return Policy::from_probabilities(pols.front().num_states, pols.front().num_actions, std::move(probs));
}

/// Expected sum of predictive action entropies along rollouts of the
/// posterior-mean policy from each candidate.
inline AcquisitionResult acq_action_entropy_with_policy(const std::vector<int>& candidates, const Policy& mean_policy,
                                                        const GridMdp& mdp, int n_rollouts, int cap,
                                                        std::uint64_t seed) {
    if (n_rollouts < 1) throw InputError("need at least one rollout");
    detail::Stopwatch clock;
    AcquisitionResult res;
    const auto cands = detail::valid_candidates(mdp, candidates, res.warnings);
    std::vector<double> h(mdp.num_states);
    for (int s = 0; s < mdp.num_states; ++s) h[s] = mean_policy.entropy(s);
    for (int s0 : cands) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(s0));
        double total = 0.0;
        for (int r = 0; r < n_rollouts; ++r) {
            const auto tau = sample_trajectory(mdp, mean_policy, s0, cap, rng);
            for (const auto& st : tau.steps) total += h[st.state];
        }
        res.scores.push_back({s0, total / n_rollouts, n_rollouts, 0.0});
    }
    res.chosen = argmax_state(res.scores);
    res.wall_time_s = clock.seconds();
    return res;
}

inline AcquisitionResult acq_action_entropy(const std::vector<int>& candidates, const PosteriorSampleSet& posterior,
                                            const GridMdp& mdp, int n_rollouts, int cap, double beta,
                                            std::uint64_t seed) {
    if (posterior.empty()) throw InputError("posterior sample set is empty");
    return acq_action_entropy_with_policy(candidates, posterior_mean_policy(posterior, beta), mdp, n_rollouts, cap,
                                          seed);
}

/// Tabular dump: candidate,score,n_samples.
inline void write_acquisition_csv(std::ostream& out, const AcquisitionResult& res) {
    out << "candidate,score,n_samples\n";
    out.precision(10);
    for (const auto& c : res.scores) out << c.state << ',' << c.score << ',' << c.n_samples << '\n';
}

}  // namespace airl
