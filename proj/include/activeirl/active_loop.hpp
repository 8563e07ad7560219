#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "activeirl/acquisition.hpp"
#include "activeirl/bayes_irl.hpp"
#include "activeirl/gridworlds.hpp"

namespace airl {

enum class Method { EigNmc, EigBo, SingleEig, SingleEigX8, Random, QEntropy, ActionEntropy };

inline constexpr Method kAllMethods[] = {Method::EigNmc,   Method::EigBo,    Method::SingleEig,
                                         Method::SingleEigX8, Method::Random, Method::QEntropy,
                                         Method::ActionEntropy};

inline std::string method_name(Method m) {
    switch (m) {
        case Method::EigNmc: return "eig_nmc";
        case Method::EigBo: return "eig_bo";
        case Method::SingleEig: return "single_eig";
        case Method::SingleEigX8: return "single_eig_x8";
        case Method::Random: return "random";
        case Method::QEntropy: return "q_entropy";
        case Method::ActionEntropy: return "action_entropy";
    }
    return "unknown";
}

inline Method parse_method(const std::string& name) {
    for (Method m : kAllMethods)
        if (method_name(m) == name) return m;
    throw ConfigError("unknown acquisition method '" + name + "'");
}

// ---------------------------------------------------------------------------
// Experts
// ---------------------------------------------------------------------------

/// Supplies demonstrations. Returning nullopt means the expert gave up.
class ExpertSource {
public:
    virtual ~ExpertSource() = default;
    virtual std::optional<Trajectory> demonstrate(const GridMdp& mdp, int xi, int cap) = 0;
};

/// Boltzmann-rational expert acting under a fixed reward vector.
class SyntheticExpert : public ExpertSource {
public:
    SyntheticExpert(const GridMdp& mdp, std::span<const double> rewards, double beta, std::uint64_t seed)
        : policy_(boltzmann_policy(value_iteration(mdp, rewards), beta)), rng_(make_rng(seed, 0xe7e7)) {}

    SyntheticExpert(const Environment& env, double beta, std::uint64_t seed)
        : SyntheticExpert(env.mdp, env.true_rewards(), beta, seed) {}

    std::optional<Trajectory> demonstrate(const GridMdp& mdp, int xi, int cap) override {
        return sample_trajectory(mdp, policy_, xi, cap, rng_);
    }

    const Policy& policy() const { return policy_; }

private:
    Policy policy_;
    Rng rng_;
};

/// Expert backed by an arbitrary callback, e.g. a human behind the demo service.
class CallbackExpert : public ExpertSource {
public:
    using Fn = std::function<std::optional<Trajectory>(const GridMdp&, int, int)>;
    explicit CallbackExpert(Fn fn) : fn_(std::move(fn)) {}
    std::optional<Trajectory> demonstrate(const GridMdp& mdp, int xi, int cap) override { return fn_(mdp, xi, cap); }

private:
    Fn fn_;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class InitialDemos { Auto, None, TopLeft };

struct ExperimentConfig {
    std::string environment = "structured";  // structured | random | layout
    std::string layout_path;                  // used when environment == "layout"
    StructuredOptions structured;
    RandomOptions random;

    Method method = Method::EigNmc;
    EIGConfig eig;
    BOConfig bo;
    SamplerConfig sampler;
    int steps = 20;
    double beta = 1.0;
    std::uint64_t seed = 0;
    InitialDemos initial_demos = InitialDemos::Auto;
    bool include_jail_candidates = true;
    int action_entropy_rollouts = 100;
    int single_state_queries = 8;
    int entropy_k = 5;
    bool record_timing = true;
    bool keep_scores = false;

    void validate() const {
        if (steps < 1) throw ConfigError("steps must be >= 1");
        if (!(beta >= 0.0)) throw ConfigError("beta must be non-negative");
        if (environment != "structured" && environment != "random" && environment != "layout")
            throw ConfigError("environment must be structured, random or layout");
        if (environment == "layout" && layout_path.empty()) throw ConfigError("layout environment needs layout_path");
        if (action_entropy_rollouts < 1) throw ConfigError("action_entropy_rollouts must be >= 1");
        if (single_state_queries < 1) throw ConfigError("single_state_queries must be >= 1");
        try {
            eig.validate();
            sampler.validate();
        } catch (const InputError& e) {
            throw ConfigError(e.what());
        }
    }
};

/// Builds the environment for `cfg.seed`. The true reward depends only on the
/// environment settings and the seed, so every method sees the same draw.
inline Environment make_environment(const ExperimentConfig& cfg) {
    if (cfg.environment == "random") return make_random_gridworld(cfg.seed, cfg.random);
    StructuredOptions opt = cfg.structured;
    if (cfg.environment == "layout") opt.layout = load_layout(cfg.layout_path);
    return make_structured_gridworld(cfg.seed, opt);
}

inline std::vector<int> default_candidates(const GridMdp& mdp, bool include_jail) {
    std::vector<int> out;
    for (int s = 0; s < mdp.num_states; ++s)
        if (!mdp.is_terminal(s) && (include_jail || !mdp.is_jail(s))) out.push_back(s);
    return out;
}

/// Uniform over non-terminal, non-jail states.
inline std::vector<double> default_target_distribution(const GridMdp& mdp) {
    std::vector<double> d(mdp.num_states, 0.0);
    int n = 0;
    for (int s = 0; s < mdp.num_states; ++s)
        if (!mdp.is_terminal(s) && !mdp.is_jail(s)) ++n;
    if (n == 0) throw InputError("no non-terminal, non-jail state for the target distribution");
    for (int s = 0; s < mdp.num_states; ++s)
        if (!mdp.is_terminal(s) && !mdp.is_jail(s)) d[s] = 1.0 / n;
    return d;
}

// ---------------------------------------------------------------------------
// Apprentice and regret
// ---------------------------------------------------------------------------

/// Greedy policy under the posterior-mean reward.
inline Policy apprentice_policy(const PosteriorSampleSet& posterior, const Environment& env, double vi_tol = 1e-8) {
    if (posterior.empty()) throw InputError("posterior sample set is empty");
    const auto q = value_iteration(env.mdp, env.reward_map.state_rewards(posterior.mean()), vi_tol);
    const auto acts = greedy_actions(q);
    return Policy::deterministic(env.mdp.num_actions, acts);
}

inline double regret(const Policy& apprentice, std::span<const double> true_rewards, const GridMdp& mdp,
                     std::span<const double> target, double vi_tol = 1e-8) {
    const auto q = value_iteration(mdp, true_rewards, vi_tol);
    const auto best = Policy::deterministic(mdp.num_actions, greedy_actions(q));
    return expected_return(mdp, best, true_rewards, target) - expected_return(mdp, apprentice, true_rewards, target);
}

// ---------------------------------------------------------------------------
// Active learning loop
// ---------------------------------------------------------------------------

struct StepRecord {
    int step = 0;
    int xi = -1;
    int traj_len = 0;
    double entropy_nats = 0.0;
    double regret = 0.0;
    double t_acq_s = 0.0;
    double t_mcmc_s = 0.0;
    double cov_trace = 0.0;
    std::vector<int> queried;  // all start states queried this step
};

struct RunRecord {
    std::string method;
    std::uint64_t seed = 0;
    bool complete = true;
    std::string error;
    double initial_entropy = 0.0;
    double initial_regret = 0.0;
    std::size_t initial_demos = 0;
    std::vector<StepRecord> rows;
    std::vector<std::vector<double>> scores;  // per step, one value per state, NaN if not scored

    double final_entropy() const { return rows.empty() ? initial_entropy : rows.back().entropy_nats; }
    double final_regret() const { return rows.empty() ? initial_regret : rows.back().regret; }
};

namespace detail {

inline std::vector<double> score_map(const AcquisitionResult& res, int num_states) {
    std::vector<double> m(num_states, std::numeric_limits<double>::quiet_NaN());
    for (const auto& c : res.scores) m[c.state] = c.score;
    return m;
}

}  // namespace detail

/// Runs one acquisition with `method` on the thinned posterior.
inline AcquisitionResult acquire(Method method, const std::vector<int>& candidates,
                                 const PosteriorSampleSet& thinned, const Environment& env,
                                 const ExperimentConfig& cfg, std::uint64_t stream_seed) {
    EIGConfig eig = cfg.eig;
    eig.step_cap = env.mdp.step_cap;
    eig.beta = cfg.beta;
    eig.seed = stream_seed;
    switch (method) {
        case Method::EigNmc: return eig_nmc(candidates, thinned, env.mdp, eig);
        case Method::EigBo: return bo_ucb_eig(candidates, thinned, env.mdp, eig, cfg.bo);
        case Method::SingleEig:
        case Method::SingleEigX8: return single_state_eig(candidates, thinned, env.mdp, eig);
        case Method::Random: {
            Rng rng = make_rng(stream_seed, 0);
            return acq_random(candidates, rng);
        }
        case Method::QEntropy: return acq_q_entropy(candidates, thinned, cfg.entropy_k);
        case Method::ActionEntropy:
            return acq_action_entropy(candidates, thinned, env.mdp, cfg.action_entropy_rollouts, env.mdp.step_cap,
                                      cfg.beta, stream_seed);
    }
    throw ConfigError("unhandled method");
}

/// Sequential experiment: acquire a start state, query the expert, refit the
/// posterior, record entropy and regret. Returns a partial record (complete =
/// false) if the expert stops answering.
inline RunRecord run_active_learning(const ExperimentConfig& cfg, const Environment& env, ExpertSource& expert) {
    cfg.validate();
    RunRecord rec;
    rec.method = method_name(cfg.method);
    rec.seed = cfg.seed;
    SamplerConfig scfg = cfg.sampler;
    scfg.beta = cfg.beta;
    const auto candidates = default_candidates(env.mdp, cfg.include_jail_candidates);
    if (candidates.empty()) throw ConfigError("environment has no candidate start states");
    const auto target = default_target_distribution(env.mdp);
    const auto true_rewards = env.true_rewards();
    const int cap = env.mdp.step_cap;

    DemoDataset data;
    InitialDemos init = cfg.initial_demos;
    if (init == InitialDemos::Auto) init = env.name == "random" ? InitialDemos::TopLeft : InitialDemos::None;
    if (init == InitialDemos::TopLeft) {
        auto t = expert.demonstrate(env.mdp, top_left_start(env.mdp), cap);
        if (!t) {
            rec.complete = false;
            rec.error = "expert did not provide the initial demonstration";
            return rec;
        }
        data.add(std::move(*t));
    }
    rec.initial_demos = data.size();

    auto refit = [&](int step) { return sample_posterior(data, env, scfg, derive_seed(cfg.seed, 1000 + step)); };
    PosteriorSampleSet post = refit(0);
    rec.initial_entropy = posterior_entropy_estimate(post, cfg.entropy_k).nats;
    rec.initial_regret = regret(apprentice_policy(post, env), true_rewards, env.mdp, target);

    for (int step = 0; step < cfg.steps; ++step) {
        StepRecord row;
        row.step = step + 1;
        const auto thinned = post.thinned_set();
        detail::Stopwatch acq_clock;
        const auto res = acquire(cfg.method, candidates, thinned, env, cfg, derive_seed(cfg.seed, 2000 + step));
        row.queried = cfg.method == Method::SingleEigX8 ? top_states(res, cfg.single_state_queries)
                                                        : std::vector<int>{res.chosen};
        row.t_acq_s = acq_clock.seconds();
        row.xi = row.queried.front();
        if (cfg.keep_scores) rec.scores.push_back(detail::score_map(res, env.mdp.num_states));

        const int query_cap = cfg.method == Method::SingleEigX8 ? 1 : cap;
        for (int xi : row.queried) {
            auto t = expert.demonstrate(env.mdp, xi, query_cap);
            if (!t) {
                rec.complete = false;
                rec.error = "expert stopped answering at step " + std::to_string(row.step);
                return rec;
            }
            row.traj_len += static_cast<int>(t->size());
            data.add(std::move(*t));
        }

        detail::Stopwatch mcmc_clock;
        post = refit(row.step);
        row.t_mcmc_s = mcmc_clock.seconds();
        row.entropy_nats = posterior_entropy_estimate(post, cfg.entropy_k).nats;
        row.cov_trace = post.covariance_trace();
        row.regret = regret(apprentice_policy(post, env), true_rewards, env.mdp, target);
        if (!cfg.record_timing) row.t_acq_s = row.t_mcmc_s = 0.0;
        rec.rows.push_back(std::move(row));
    }
    return rec;
}

/// Convenience overload: synthetic expert under the environment's true reward.
inline RunRecord run_active_learning(const ExperimentConfig& cfg) {
    const Environment env = make_environment(cfg);
    SyntheticExpert expert(env, cfg.beta, derive_seed(cfg.seed, 0xd3e0));
    return run_active_learning(cfg, env, expert);
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

struct SuiteRun {
    Method method;
    std::uint64_t seed;
    RunRecord record;
};

struct CurveSummary {
    std::string method;
    std::vector<double> entropy_mean, entropy_std, entropy_median;
    std::vector<double> regret_mean, regret_std, regret_median;
};

inline double median(std::vector<double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// Every (method, seed) pair, up to `jobs` runs at a time. Results are in
/// method-major order and do not depend on `jobs`.
inline std::vector<SuiteRun> run_suite(const ExperimentConfig& base, const std::vector<Method>& methods,
                                       const std::vector<std::uint64_t>& seeds, unsigned jobs = 1) {
    base.validate();
    std::vector<SuiteRun> runs;
    for (Method m : methods)
        for (auto s : seeds) runs.push_back({m, s, {}});
    parallel_for(runs.size(), jobs, [&](std::size_t i) {
        ExperimentConfig cfg = base;
        cfg.method = runs[i].method;
        cfg.seed = runs[i].seed;
        try {
            runs[i].record = run_active_learning(cfg);
        } catch (const std::exception& e) {
            runs[i].record.method = method_name(cfg.method);
            runs[i].record.seed = cfg.seed;
            runs[i].record.complete = false;
            runs[i].record.error = e.what();
        }
    });
    return runs;
}

inline std::vector<CurveSummary> summarize_suite(const std::vector<SuiteRun>& runs) {
    std::vector<CurveSummary> out;
    for (Method m : kAllMethods) {
        std::vector<const RunRecord*> recs;
        for (const auto& r : runs)
            if (r.method == m && r.record.complete) recs.push_back(&r.record);
        if (recs.empty()) continue;
        CurveSummary cs;
        cs.method = method_name(m);
        std::size_t steps = recs.front()->rows.size();
        for (auto* r : recs) steps = std::min(steps, r->rows.size());
        for (std::size_t t = 0; t < steps; ++t) {
            std::vector<double> h, g;
            for (auto* r : recs) {
                h.push_back(r->rows[t].entropy_nats);
                g.push_back(r->rows[t].regret);
            }
            auto push = [](const std::vector<double>& xs, std::vector<double>& mean, std::vector<double>& sd,
                           std::vector<double>& med) {
                double mu = 0.0, ss = 0.0;
                for (double x : xs) mu += x;
                mu /= static_cast<double>(xs.size());
                for (double x : xs) ss += (x - mu) * (x - mu);
                mean.push_back(mu);
                sd.push_back(xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0);
                med.push_back(median(xs));
            };
            push(h, cs.entropy_mean, cs.entropy_std, cs.entropy_median);
            push(g, cs.regret_mean, cs.regret_std, cs.regret_median);
        }
        out.push_back(std::move(cs));
    }
    return out;
}

/// Median of the final-step values of `method` across complete runs.
inline double median_final(const std::vector<SuiteRun>& runs, Method method, bool entropy) {
    std::vector<double> xs;
    for (const auto& r : runs)
        if (r.method == method && r.record.complete)
            xs.push_back(entropy ? r.record.final_entropy() : r.record.final_regret());
    return median(xs);
}

}  // namespace airl
