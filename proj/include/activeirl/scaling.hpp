#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "activeirl/active_loop.hpp"

namespace airl {

/// Wall-time benchmark over scaled-up structured gridworlds.
struct ScaleConfig {
    std::vector<int> sizes{6, 8, 10, 12, 14};
    int trials = 3;
    int warmup_steps = 50;
    int kept_samples = 200;
    int steps = 5;
    int reference_size = 6;  // BO budget rule: linear part is calibrated at this size
    bool include_bo = true;
    std::uint64_t seed = 0;
};

struct TimingRow {
    int size = 0;
    std::string phase;  // eig | mcmc | eig_bo
    double mean_s = 0.0;
    double std_s = 0.0;
    int samples = 0;
};

struct ScaleResult {
    std::vector<TimingRow> rows;     // size x {eig, mcmc}
    std::vector<TimingRow> bo_rows;  // size x {eig_bo}
    double p_eig = 0.0, c_eig = 0.0;
    double p_mcmc = 0.0, c_mcmc = 0.0;
};

/// Least-squares fit of log t = log c + p log n. Returns {p, c}.
inline std::pair<double, double> fit_power_law(const std::vector<double>& n, const std::vector<double>& t) {
    if (n.size() != t.size() || n.size() < 2) throw InputError("power-law fit needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        mx += std::log(n[i]);
        my += std::log(t[i]);
    }
    mx /= static_cast<double>(n.size());
    my /= static_cast<double>(n.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        sxy += (std::log(n[i]) - mx) * (std::log(t[i]) - my);
        sxx += (std::log(n[i]) - mx) * (std::log(n[i]) - mx);
    }
    const double p = sxy / sxx;
    return {p, std::exp(my - p * mx)};
}

/// Quarter-flat budget rule: N_r*N_tau/4 per candidate, plus a remainder that
/// grows linearly in the side length n.
inline BOConfig quarter_flat_budget(const BOConfig& base, const EIGConfig& eig, int n, int n_candidates,
                                    int reference_size) {
    BOConfig bo = base;
    const int per_state = eig.n_rewards * eig.n_trajectories;
    bo.init_samples_per_state = std::max(1, per_state / 4);
    const long linear = static_cast<long>(std::llround(0.75 * per_state * reference_size * n));
    bo.total_budget = static_cast<long>(bo.init_samples_per_state) * n_candidates + linear;
    return bo;
}

inline Environment scaled_structured_environment(int n, std::uint64_t seed) {
    StructuredOptions opt;
    opt.layout = scaled_structured_layout(n);
    return make_structured_gridworld(seed, opt);
}

namespace detail {

inline TimingRow timing_row(int size, const std::string& phase, const std::vector<double>& xs) {
    TimingRow r{size, phase, 0.0, 0.0, static_cast<int>(xs.size())};
    for (double x : xs) r.mean_s += x;
    r.mean_s /= static_cast<double>(xs.size());
    for (double x : xs) r.std_s += (x - r.mean_s) * (x - r.mean_s);
    r.std_s = xs.size() > 1 ? std::sqrt(r.std_s / static_cast<double>(xs.size() - 1)) : 0.0;
    return r;
}

}  // namespace detail

inline ScaleResult run_scale(const ScaleConfig& sc) {
    if (sc.trials < 1 || sc.steps < 1) throw InputError("scale benchmark needs trials >= 1 and steps >= 1");
    for (int n : sc.sizes)
        if (n < 4) throw InputError("scale benchmark sizes must be >= 4");
    ScaleResult out;
    std::vector<double> ns, t_eig, t_mcmc;
    for (int n : sc.sizes) {
        std::vector<double> eig, mcmc, bo;
        for (int trial = 0; trial < sc.trials; ++trial) {
            const std::uint64_t seed = derive_seed(sc.seed, static_cast<std::uint64_t>(trial));
            const Environment env = scaled_structured_environment(n, seed);
            ExperimentConfig cfg;
            cfg.steps = sc.steps;
            cfg.seed = seed;
            cfg.sampler.warmup_steps = sc.warmup_steps;
            cfg.sampler.kept_samples = sc.kept_samples;
            cfg.method = Method::EigNmc;
            {
                SyntheticExpert expert(env, cfg.beta, derive_seed(seed, 0xd3e0));
                const auto rec = run_active_learning(cfg, env, expert);
                for (const auto& r : rec.rows) {
                    eig.push_back(r.t_acq_s);
                    mcmc.push_back(r.t_mcmc_s);
                }
            }
            if (sc.include_bo) {
                cfg.method = Method::EigBo;
                cfg.bo = quarter_flat_budget(cfg.bo, cfg.eig, n,
                                             static_cast<int>(default_candidates(env.mdp, true).size()),
                                             sc.reference_size);
                SyntheticExpert expert(env, cfg.beta, derive_seed(seed, 0xd3e0));
                const auto rec = run_active_learning(cfg, env, expert);
                for (const auto& r : rec.rows) bo.push_back(r.t_acq_s);
            }
        }
        out.rows.push_back(detail::timing_row(n, "eig", eig));
        out.rows.push_back(detail::timing_row(n, "mcmc", mcmc));
        if (sc.include_bo) out.bo_rows.push_back(detail::timing_row(n, "eig_bo", bo));
        ns.push_back(n);
        t_eig.push_back(out.rows[out.rows.size() - 2].mean_s);
        t_mcmc.push_back(out.rows.back().mean_s);
    }
    if (ns.size() >= 2) {
        std::tie(out.p_eig, out.c_eig) = fit_power_law(ns, t_eig);
        std::tie(out.p_mcmc, out.c_mcmc) = fit_power_law(ns, t_mcmc);
    }
    return out;
}

inline void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows) {
    out << "size,phase,mean_s,std_s,samples\n";
    out.precision(9);
    for (const auto& r : rows) out << r.size << ',' << r.phase << ',' << r.mean_s << ',' << r.std_s << ',' << r.samples << '\n';
}

}  // namespace airl
