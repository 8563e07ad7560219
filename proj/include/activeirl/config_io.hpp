#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "activeirl/active_loop.hpp"

namespace airl {

using nlohmann::json;

/// A suite: one base config fanned out over methods and seeds.
struct SuiteConfig {
    ExperimentConfig base;
    std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
    std::vector<std::uint64_t> seeds{0};
};

namespace detail {

template <class T>
void read_key(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) {
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (const char* n : known) ok = ok || k == n;
        if (!ok) throw ConfigError("unknown key '" + k + "' in " + where);
    }
}

inline std::string initial_demos_name(InitialDemos d) {
    switch (d) {
        case InitialDemos::Auto: return "auto";
        case InitialDemos::None: return "none";
        case InitialDemos::TopLeft: return "top_left";
    }
    return "auto";
}

inline InitialDemos parse_initial_demos(const std::string& s) {
    if (s == "auto") return InitialDemos::Auto;
    if (s == "none") return InitialDemos::None;
    if (s == "top_left") return InitialDemos::TopLeft;
    throw ConfigError("initial_demos must be auto, none or top_left");
}

}  // namespace detail

inline json to_json(const ExperimentConfig& c) {
    const auto& s = c.structured;
    const auto& r = c.random;
    return json{
        {"environment", c.environment},
        {"layout_path", c.layout_path},
        {"method", method_name(c.method)},
        {"steps", c.steps},
        {"beta", c.beta},
        {"seed", c.seed},
        {"initial_demos", detail::initial_demos_name(c.initial_demos)},
        {"include_jail_candidates", c.include_jail_candidates},
        {"action_entropy_rollouts", c.action_entropy_rollouts},
        {"single_state_queries", c.single_state_queries},
        {"entropy_k", c.entropy_k},
        {"record_timing", c.record_timing},
        {"keep_scores", c.keep_scores},
        {"structured",
         {{"layout", s.layout.to_string()},
          {"gamma", s.gamma},
          {"step_cap", s.step_cap},
          {"prior_lo", s.prior_lo},
          {"prior_hi", s.prior_hi},
          {"path_reward", s.path_reward},
          {"goal_reward", s.goal_reward},
          {"jail_reward", s.jail_reward}}},
        {"random",
         {{"size", r.size},
          {"reward_scale", r.reward_scale},
          {"scale_is_variance", r.scale_is_variance},
          {"terminal_prob", r.terminal_prob},
          {"terminal_quantile", r.terminal_quantile},
          {"gamma", r.gamma},
          {"step_cap", r.step_cap}}},
        {"eig", {{"n_rewards", c.eig.n_rewards}, {"n_trajectories", c.eig.n_trajectories}, {"jobs", c.eig.jobs}}},
        {"bo",
         {{"mu_prior", c.bo.mu_prior},
          {"sigma_prior", c.bo.sigma_prior},
          {"phi", c.bo.phi},
          {"phi_log_sd", c.bo.phi_log_sd},
          {"kappa", c.bo.kappa},
          {"init_samples_per_state", c.bo.init_samples_per_state},
          {"total_budget", c.bo.total_budget}}},
        {"sampler",
         {{"kind", c.sampler.kind == SamplerKind::EllipticalSlice ? "elliptical_slice" : "metropolis"},
          {"warmup_steps", c.sampler.warmup_steps},
          {"kept_samples", c.sampler.kept_samples},
          {"thin_to", c.sampler.thin_to},
          {"initial_scale", c.sampler.initial_scale},
          {"target_acceptance", c.sampler.target_acceptance},
          {"init_draws", c.sampler.init_draws},
          {"chains", c.sampler.chains},
          {"transitions_per_step", c.sampler.transitions_per_step},
          {"vi_tol", c.sampler.vi_tol}}},
    };
}

/// Overlays the keys present in `j` onto `c`. Unknown keys are errors.
inline void apply_json(const json& j, ExperimentConfig& c) {
    using detail::read_key;
    detail::reject_unknown(j,
                           {"environment", "layout_path", "method", "steps", "beta", "seed", "initial_demos",
                            "include_jail_candidates", "action_entropy_rollouts", "single_state_queries",
                            "entropy_k", "record_timing", "keep_scores", "structured", "random", "eig", "bo",
                            "sampler"},
                           "config");
    read_key(j, "environment", c.environment);
    read_key(j, "layout_path", c.layout_path);
    if (j.contains("method")) c.method = parse_method(j.at("method").get<std::string>());
    read_key(j, "steps", c.steps);
    read_key(j, "beta", c.beta);
    read_key(j, "seed", c.seed);
    if (j.contains("initial_demos"))
        c.initial_demos = detail::parse_initial_demos(j.at("initial_demos").get<std::string>());
    read_key(j, "include_jail_candidates", c.include_jail_candidates);
    read_key(j, "action_entropy_rollouts", c.action_entropy_rollouts);
    read_key(j, "single_state_queries", c.single_state_queries);
    read_key(j, "entropy_k", c.entropy_k);
    read_key(j, "record_timing", c.record_timing);
    read_key(j, "keep_scores", c.keep_scores);
    if (auto it = j.find("structured"); it != j.end()) {
        detail::reject_unknown(*it, {"layout", "gamma", "step_cap", "prior_lo", "prior_hi", "path_reward",
                                     "goal_reward", "jail_reward"},
                               "structured");
        auto& s = c.structured;
        if (it->contains("layout")) s.layout = parse_layout(it->at("layout").get<std::string>());
        read_key(*it, "gamma", s.gamma);
        read_key(*it, "step_cap", s.step_cap);
        read_key(*it, "prior_lo", s.prior_lo);
        read_key(*it, "prior_hi", s.prior_hi);
        read_key(*it, "path_reward", s.path_reward);
        read_key(*it, "goal_reward", s.goal_reward);
        read_key(*it, "jail_reward", s.jail_reward);
    }
    if (auto it = j.find("random"); it != j.end()) {
        detail::reject_unknown(*it, {"size", "reward_scale", "scale_is_variance", "terminal_prob",
                                     "terminal_quantile", "gamma", "step_cap"},
                               "random");
        auto& r = c.random;
        read_key(*it, "size", r.size);
        read_key(*it, "reward_scale", r.reward_scale);
        read_key(*it, "scale_is_variance", r.scale_is_variance);
        read_key(*it, "terminal_prob", r.terminal_prob);
        read_key(*it, "terminal_quantile", r.terminal_quantile);
        read_key(*it, "gamma", r.gamma);
        read_key(*it, "step_cap", r.step_cap);
    }
    if (auto it = j.find("eig"); it != j.end()) {
        detail::reject_unknown(*it, {"n_rewards", "n_trajectories", "jobs"}, "eig");
        read_key(*it, "n_rewards", c.eig.n_rewards);
        read_key(*it, "n_trajectories", c.eig.n_trajectories);
        read_key(*it, "jobs", c.eig.jobs);
    }
    if (auto it = j.find("bo"); it != j.end()) {
        detail::reject_unknown(*it, {"mu_prior", "sigma_prior", "phi", "phi_log_sd", "kappa",
                                     "init_samples_per_state", "total_budget"},
                               "bo");
        read_key(*it, "mu_prior", c.bo.mu_prior);
        read_key(*it, "sigma_prior", c.bo.sigma_prior);
        read_key(*it, "phi", c.bo.phi);
        read_key(*it, "phi_log_sd", c.bo.phi_log_sd);
        read_key(*it, "kappa", c.bo.kappa);
        read_key(*it, "init_samples_per_state", c.bo.init_samples_per_state);
        read_key(*it, "total_budget", c.bo.total_budget);
    }
    if (auto it = j.find("sampler"); it != j.end()) {
        detail::reject_unknown(*it, {"kind", "warmup_steps", "kept_samples", "thin_to", "initial_scale",
                                     "target_acceptance", "init_draws", "chains", "transitions_per_step", "vi_tol"},
                               "sampler");
        auto& s = c.sampler;
        if (it->contains("kind")) {
            const auto k = it->at("kind").get<std::string>();
            if (k == "elliptical_slice") s.kind = SamplerKind::EllipticalSlice;
            else if (k == "metropolis") s.kind = SamplerKind::Metropolis;
            else throw ConfigError("sampler.kind must be elliptical_slice or metropolis");
        }
        read_key(*it, "warmup_steps", s.warmup_steps);
        read_key(*it, "kept_samples", s.kept_samples);
        read_key(*it, "thin_to", s.thin_to);
        read_key(*it, "initial_scale", s.initial_scale);
        read_key(*it, "target_acceptance", s.target_acceptance);
        read_key(*it, "init_draws", s.init_draws);
        read_key(*it, "chains", s.chains);
        read_key(*it, "transitions_per_step", s.transitions_per_step);
        read_key(*it, "vi_tol", s.vi_tol);
    }
}

inline json to_json(const SuiteConfig& s) {
    json methods = json::array();
    for (Method m : s.methods) methods.push_back(method_name(m));
    return json{{"experiment", to_json(s.base)}, {"methods", methods}, {"seeds", s.seeds}};
}

inline SuiteConfig preset(const std::string& name) {
    SuiteConfig s;
    s.seeds.clear();
    if (name == "structured-paper") {
        s.base.environment = "structured";
        for (std::uint64_t i = 0; i < 10; ++i) s.seeds.push_back(i);
    } else if (name == "random-paper") {
        s.base.environment = "random";
        for (std::uint64_t i = 0; i < 16; ++i) s.seeds.push_back(i);
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected structured-paper or random-paper)");
    }
    return s;
}

/// Reads {"preset"?, "experiment"?, "methods"?, "seeds"?} or a bare
/// experiment object. Presets are applied first, then overrides.
inline SuiteConfig suite_from_json(const json& j) {
    SuiteConfig s;
    if (j.contains("preset") || j.contains("experiment") || j.contains("methods") || j.contains("seeds")) {
        detail::reject_unknown(j, {"preset", "experiment", "methods", "seeds"}, "suite config");
        if (j.contains("preset")) s = preset(j.at("preset").get<std::string>());
        if (j.contains("experiment")) apply_json(j.at("experiment"), s.base);
        if (j.contains("methods")) {
            s.methods.clear();
            for (const auto& m : j.at("methods")) s.methods.push_back(parse_method(m.get<std::string>()));
        }
        if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
        apply_json(j, s.base);
        s.methods = {s.base.method};
        s.seeds = {s.base.seed};
    }
    if (s.methods.empty() || s.seeds.empty()) throw ConfigError("suite needs at least one method and one seed");
    s.base.validate();
    return s;
}

inline SuiteConfig load_suite_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return suite_from_json(j);
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline constexpr const char* kMetricsHeader = "step,xi,traj_len,entropy_nats,regret,t_acq_s,t_mcmc_s";

inline void write_metrics_csv(std::ostream& out, const RunRecord& rec) {
    out << kMetricsHeader << '\n';
    for (const auto& r : rec.rows)
        out << r.step << ',' << r.xi << ',' << r.traj_len << ',' << format_double(r.entropy_nats) << ','
            << format_double(r.regret) << ',' << format_double(r.t_acq_s) << ',' << format_double(r.t_mcmc_s)
            << '\n';
}

inline std::vector<StepRecord> read_metrics_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kMetricsHeader) throw ConfigError("metrics table has an unexpected header");
    std::vector<StepRecord> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        StepRecord r;
        char c1, c2, c3, c4, c5, c6;
        std::istringstream ls(line);
        if (!(ls >> r.step >> c1 >> r.xi >> c2 >> r.traj_len >> c3 >> r.entropy_nats >> c4 >> r.regret >> c5 >>
              r.t_acq_s >> c6 >> r.t_mcmc_s))
            throw ConfigError("malformed metrics row: " + line);
        rows.push_back(r);
    }
    return rows;
}

/// Secondary per-step diagnostics: covariance trace and all queried states.
inline void write_diagnostics_csv(std::ostream& out, const RunRecord& rec) {
    out << "step,cov_trace,queried\n";
    for (const auto& r : rec.rows) {
        out << r.step << ',' << format_double(r.cov_trace) << ',';
        for (std::size_t i = 0; i < r.queried.size(); ++i) out << (i ? ";" : "") << r.queried[i];
        out << '\n';
    }
}

/// One row per state: step,state,score (nan where the state was not scored).
inline void write_heatmap_csv(std::ostream& out, const std::vector<double>& scores, int step) {
    out << "step,state,score\n";
    for (std::size_t s = 0; s < scores.size(); ++s)
        out << step << ',' << s << ',' << (std::isnan(scores[s]) ? std::string("nan") : format_double(scores[s]))
            << '\n';
}

}  // namespace airl
