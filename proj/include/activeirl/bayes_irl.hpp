#pragma once

#include <chrono>
#include <cmath>
#include <future>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "activeirl/gridworlds.hpp"
#include "activeirl/knn_entropy.hpp"
#include "activeirl/mdp.hpp"

namespace airl {

// ---------------------------------------------------------------------------
// Demonstrations
// ---------------------------------------------------------------------------

struct DemoDataset {
    std::vector<Trajectory> trajectories;

    std::size_t size() const { return trajectories.size(); }
    bool empty() const { return trajectories.empty(); }
    void add(Trajectory t) { trajectories.push_back(std::move(t)); }

    std::size_t total_steps() const {
        std::size_t n = 0;
        for (const auto& t : trajectories) n += t.size();
        return n;
    }

    void validate(const GridMdp& mdp) const {
        for (const auto& t : trajectories) {
            if (t.steps.empty()) continue;
            if (t.steps.front().state != t.xi) throw InputError("trajectory does not start at its xi");
            for (const auto& st : t.steps)
                if (!mdp.valid_state(st.state) || !mdp.valid_action(st.action))
                    throw InputError("trajectory contains an invalid state or action");
        }
    }
};

/// (state, action) visit counts: the likelihood only depends on these.
struct DemoCounts {
    struct Row {
        int state;
        std::vector<int> counts;
    };
    std::vector<Row> rows;

    static DemoCounts from(const DemoDataset& data, int num_states, int num_actions) {
        std::vector<std::vector<int>> table(num_states);
        for (const auto& t : data.trajectories)
            for (const auto& st : t.steps) {
                auto& row = table[st.state];
                if (row.empty()) row.assign(num_actions, 0);
                ++row[st.action];
            }
        DemoCounts dc;
        for (int s = 0; s < num_states; ++s)
            if (!table[s].empty()) dc.rows.push_back({s, std::move(table[s])});
        return dc;
    }

    double log_likelihood(const QFunction& q, double beta) const {
        double ll = 0.0;
        for (const auto& row : rows) {
            const auto qs = q.row(row.state);
            double m = kNegInf;
            for (double v : qs) m = std::max(m, beta * v);
            double z = 0.0;
            for (double v : qs) z += std::exp(beta * v - m);
            const double log_z = m + std::log(z);
            for (int a = 0; a < q.num_actions; ++a)
                if (row.counts[a] > 0) ll += row.counts[a] * (beta * qs[a] - log_z);
        }
        return ll;
    }
};

// ---------------------------------------------------------------------------
// Posterior density
// ---------------------------------------------------------------------------

/// log p(theta) + sum over demonstrations of log p(tau | theta). Returns -inf
/// outside the prior support.
inline double log_posterior(std::span<const double> theta, const DemoDataset& data, const Environment& env,
                            double beta, double vi_tol = 1e-6) {
    const double lp = env.prior.log_density(theta);
    if (!std::isfinite(lp)) return kNegInf;
    if (data.empty()) return lp;
    const auto q = value_iteration(env.mdp, env.reward_map.state_rewards(theta), vi_tol);
    return lp + DemoCounts::from(data, env.mdp.num_states, env.mdp.num_actions).log_likelihood(q, beta);
}

// ---------------------------------------------------------------------------
// Sampler
// ---------------------------------------------------------------------------

enum class SamplerKind { EllipticalSlice, Metropolis };

struct SamplerConfig {
    int warmup_steps = 100;
    int kept_samples = 200;
    int thin_to = 50;
    double beta = 1.0;
    SamplerKind kind = SamplerKind::EllipticalSlice;
    double initial_scale = 0.1;  // Metropolis: fraction of each prior width
    double target_acceptance = 0.3;
    int init_draws = 20;         // best-of-n prior draws seed the chain
    int chains = 1;
    int transitions_per_step = 3;  // kernel updates per warmup/kept step
    double vi_tol = 1e-6;

    void validate() const {
        if (warmup_steps < 0) throw InputError("warmup_steps must be >= 0");
        if (thin_to < 1 || kept_samples < thin_to) throw InputError("need kept_samples >= thin_to >= 1");
        if (chains < 1 || kept_samples % chains != 0)
            throw InputError("kept_samples must be a positive multiple of chains");
        if (!(beta >= 0.0)) throw InputError("beta must be non-negative");
        if (transitions_per_step < 1) throw InputError("transitions_per_step must be >= 1");
    }
};

struct SamplerProvenance {
    std::string sampler;
    int warmup_steps = 0;
    int kept_samples = 0;
    int thin_to = 0;
    std::uint64_t seed = 0;
    double acceptance_rate = 1.0;
    double mean_evals_per_step = 1.0;
    std::vector<double> final_scale;
    std::vector<std::string> warnings;
};

/// Kept MCMC draws plus optimal Q per draw. `thinned_index` selects the
/// evenly spaced subset used downstream by acquisition functions.
struct PosteriorSampleSet {
    std::vector<Theta> samples;
    std::vector<std::shared_ptr<const QFunction>> q_cache;
    std::vector<std::size_t> thinned_index;
    SamplerProvenance provenance;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    int dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().size()); }
    bool has_q_cache() const { return q_cache.size() == samples.size() && !samples.empty(); }

    /// Sample set restricted to the thinned indices (all samples if no
    /// thinning was recorded).
    PosteriorSampleSet thinned_set() const {
        if (thinned_index.empty()) return *this;
        PosteriorSampleSet out;
        out.provenance = provenance;
        for (std::size_t i : thinned_index) {
            out.samples.push_back(samples[i]);
            if (has_q_cache()) out.q_cache.push_back(q_cache[i]);
        }
        return out;
    }

    /// Row-major buffer of all samples.
    std::vector<double> flat() const {
        std::vector<double> out;
        out.reserve(samples.size() * dim());
        for (const auto& s : samples) out.insert(out.end(), s.begin(), s.end());
        return out;
    }

    std::vector<double> mean() const {
        std::vector<double> m(dim(), 0.0);
        for (const auto& s : samples)
            for (int i = 0; i < dim(); ++i) m[i] += s[i];
        for (auto& v : m) v /= static_cast<double>(samples.size());
        return m;
    }

    std::vector<double> stddev() const {
        const auto m = mean();
        std::vector<double> v(dim(), 0.0);
        for (const auto& s : samples)
            for (int i = 0; i < dim(); ++i) v[i] += (s[i] - m[i]) * (s[i] - m[i]);
        for (auto& x : v) x = samples.size() > 1 ? std::sqrt(x / static_cast<double>(samples.size() - 1)) : 0.0;
        return v;
    }

    double covariance_trace() const {
        double t = 0.0;
        for (double s : stddev()) t += s * s;
        return t;
    }

    /// Builds a set from explicit parameter vectors, solving for Q* on each.
    static PosteriorSampleSet from_thetas(std::vector<Theta> thetas, const Environment& env,
                                          double vi_tol = 1e-6) {
        PosteriorSampleSet out;
        out.samples = std::move(thetas);
        for (const auto& t : out.samples)
            out.q_cache.push_back(std::make_shared<const QFunction>(
                value_iteration(env.mdp, env.reward_map.state_rewards(t), vi_tol)));
        out.provenance.sampler = "explicit";
        out.provenance.kept_samples = static_cast<int>(out.samples.size());
        out.provenance.thin_to = static_cast<int>(out.samples.size());
        return out;
    }
};

/// Evenly spaced indices: floor((i + 1) * n / m) - 1 for i < m.
inline std::vector<std::size_t> thin_indices(std::size_t n, std::size_t m) {
    std::vector<std::size_t> idx;
    m = std::min(n, m);
    for (std::size_t i = 0; i < m; ++i) idx.push_back((i + 1) * n / m - 1);
    return idx;
}

namespace detail {

// Standard normal CDF and its inverse, used to map latent Gaussian
// coordinates onto a uniform box.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double norm_icdf(double p) {
    // Acklam's rational approximation followed by one Halley step.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01, -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    p = std::clamp(p, 1e-300, 1.0 - 1e-16);
    double x;
    if (p < 0.02425) {
        const double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= 1 - 0.02425) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        const double q = std::sqrt(-2 * std::log(1 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    const double e = norm_cdf(x) - p;
    const double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
    return x - u / (1 + x * u / 2);
}

// theta <-> latent z with z ~ N(0, I) under the prior.
inline Theta latent_to_theta(const Prior& prior, std::span<const double> z) {
    Theta t(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (prior.kind == Prior::Kind::Normal)
            t[i] = prior.a[i] + prior.b[i] * z[i];
        else
            t[i] = prior.a[i] + (prior.b[i] - prior.a[i]) * norm_cdf(z[i]);
    }
    return t;
}

inline std::vector<double> theta_to_latent(const Prior& prior, std::span<const double> theta) {
    std::vector<double> z(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (prior.kind == Prior::Kind::Normal)
            z[i] = (theta[i] - prior.a[i]) / prior.b[i];
        else
            z[i] = norm_icdf((theta[i] - prior.a[i]) / (prior.b[i] - prior.a[i]));
    }
    return z;
}

}  // namespace detail

/// Random-walk Metropolis kernel with a diagonal Gaussian proposal.
/// `log_target` returns the unnormalized log density (or -inf).
class MetropolisKernel {
public:
    explicit MetropolisKernel(std::vector<double> scales) : scales_(std::move(scales)) {}

    /// One step. Returns true if the proposal was accepted.
    template <class LogTarget>
    bool step(std::vector<double>& x, double& log_px, LogTarget&& log_target, Rng& rng) {
        std::normal_distribution<double> noise(0.0, 1.0);
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + scale_mult_ * scales_[i] * noise(rng);
        const double log_py = log_target(y);
        if (std::isfinite(log_py) && std::log(uniform01(rng)) < log_py - log_px) {
            x = std::move(y);
            log_px = log_py;
            return true;
        }
        return false;
    }

    /// Robbins-Monro update of the global scale multiplier toward `target`.
    void adapt(bool accepted, int t, double target) {
        log_mult_ += ((accepted ? 1.0 : 0.0) - target) / std::sqrt(t + 1.0);
        log_mult_ = std::clamp(log_mult_, -12.0, 3.0);
        scale_mult_ = std::exp(log_mult_);
    }

    std::vector<double> effective_scales() const {
        auto s = scales_;
        for (auto& v : s) v *= scale_mult_;
        return s;
    }

private:
    std::vector<double> scales_;
    double log_mult_ = 0.0;
    double scale_mult_ = 1.0;
};

/// Elliptical slice sampling for targets N(z; 0, I) * L(z). Tuning-free and
/// never returns an exact repeat of the current state.
class EllipticalSliceKernel {
public:
    struct Outcome {
        int evals;
        bool moved;
    };

    template <class LogLik>
    Outcome step(std::vector<double>& z, double& log_lz, LogLik&& log_lik, Rng& rng, int max_shrinks = 200) {
        std::normal_distribution<double> noise(0.0, 1.0);
        std::vector<double> nu(z.size()), cand(z.size());
        for (auto& v : nu) v = noise(rng);
        const double log_y = log_lz + std::log(uniform01(rng));
        double angle = uniform01(rng) * 2.0 * M_PI;
        double lo = angle - 2.0 * M_PI, hi = angle;
        for (int evals = 1; evals <= max_shrinks; ++evals) {
            const double c = std::cos(angle), s = std::sin(angle);
            for (std::size_t i = 0; i < z.size(); ++i) cand[i] = z[i] * c + nu[i] * s;
            const double ll = log_lik(cand);
            if (ll > log_y) {
                z = cand;
                log_lz = ll;
                return {evals, true};
            }
            if (angle < 0.0)
                lo = angle;
            else
                hi = angle;
            angle = lo + uniform01(rng) * (hi - lo);
        }
        return {max_shrinks, false};
    }
};

namespace detail {

struct ChainResult {
    std::vector<Theta> samples;
    std::vector<std::shared_ptr<const QFunction>> q;
    double acceptance = 1.0;
    double evals_per_step = 1.0;
    std::vector<double> scales;
};

// Likelihood evaluation that remembers the last solved Q to warm-start the
// next value iteration and to hand cached Q* to the sample set.
class LikelihoodCache {
public:
    LikelihoodCache(const Environment& env, const DemoDataset& data, double beta, double tol)
        : env_(env), counts_(DemoCounts::from(data, env.mdp.num_states, env.mdp.num_actions)),
          beta_(beta), tol_(tol) {}

    double eval(std::span<const double> theta) {
        auto q = std::make_shared<const QFunction>(
            value_iteration(env_.mdp, env_.reward_map.state_rewards(theta), tol_, last_.get()));
        const double ll = counts_.log_likelihood(*q, beta_);
        last_ = std::move(q);
        return ll;
    }
    std::shared_ptr<const QFunction> last() const { return last_; }

private:
    const Environment& env_;
    DemoCounts counts_;
    double beta_;
    double tol_;
    std::shared_ptr<const QFunction> last_;
};

inline ChainResult run_chain(const DemoDataset& data, const Environment& env, const SamplerConfig& cfg,
                             int kept, Rng& rng) {
    const Prior& prior = env.prior;
    const int dim = prior.dim();
    LikelihoodCache lik(env, data, cfg.beta, cfg.vi_tol);

    // Start from the most likely of a handful of prior draws.
    Theta x;
    double best = kNegInf;
    std::shared_ptr<const QFunction> q_cur;
    for (int i = 0; i < std::max(1, cfg.init_draws); ++i) {
        Theta cand = prior.sample(rng);
        const double ll = lik.eval(cand);
        if (x.empty() || ll > best) {
            x = std::move(cand);
            best = ll;
            q_cur = lik.last();
        }
    }

    ChainResult res;
    if (cfg.kind == SamplerKind::EllipticalSlice) {
        EllipticalSliceKernel kernel;
        auto z = theta_to_latent(prior, x);
        double log_lz = best;
        long evals = 0, steps = 0;
        auto loglik = [&](const std::vector<double>& zz) { return lik.eval(latent_to_theta(prior, zz)); };
        for (int t = 0; t < cfg.warmup_steps + kept; ++t) {
            for (int k = 0; k < cfg.transitions_per_step; ++k) {
                const auto outcome = kernel.step(z, log_lz, loglik, rng);
                evals += outcome.evals;
                ++steps;
                if (outcome.moved) q_cur = lik.last();
            }
            if (t >= cfg.warmup_steps) {
                res.samples.push_back(latent_to_theta(prior, z));
                res.q.push_back(q_cur);
            }
        }
        res.evals_per_step = steps > 0 ? static_cast<double>(evals) / steps : 0.0;
    } else {
        std::vector<double> scales(dim);
        for (int i = 0; i < dim; ++i) scales[i] = cfg.initial_scale * prior.scale(i);
        MetropolisKernel kernel(scales);
        double log_px = prior.log_density(x) + best;
        auto log_target = [&](const std::vector<double>& y) {
            const double lp = prior.log_density(y);
            if (!std::isfinite(lp)) return kNegInf;
            return lp + lik.eval(y);
        };
        long accepted_after = 0;
        for (int t = 0; t < cfg.warmup_steps + kept; ++t) {
            int acc = 0;
            for (int k = 0; k < cfg.transitions_per_step; ++k) {
                const bool moved = kernel.step(x, log_px, log_target, rng);
                if (moved) q_cur = lik.last();
                if (t < cfg.warmup_steps) kernel.adapt(moved, t * cfg.transitions_per_step + k, cfg.target_acceptance);
                acc += moved;
            }
            if (t >= cfg.warmup_steps) {
                accepted_after += acc;
                res.samples.push_back(x);
                res.q.push_back(q_cur);
            }
        }
        res.acceptance = kept > 0 ? static_cast<double>(accepted_after) / (static_cast<double>(kept) * cfg.transitions_per_step) : 0.0;
        res.scales = kernel.effective_scales();
    }
    return res;
}

}  // namespace detail

/// Draws posterior samples of the reward parameters given `data`. Each call
/// starts a fresh chain; results are a pure function of the inputs and `seed`.
inline PosteriorSampleSet sample_posterior(const DemoDataset& data, const Environment& env,
                                           const SamplerConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    data.validate(env.mdp);
    const int per_chain = cfg.kept_samples / cfg.chains;

    std::vector<detail::ChainResult> chains(cfg.chains);
    if (cfg.chains == 1) {
        Rng rng = make_rng(seed, 0);
        chains[0] = detail::run_chain(data, env, cfg, per_chain, rng);
    } else {
        std::vector<std::future<detail::ChainResult>> futs;
        for (int c = 0; c < cfg.chains; ++c)
            futs.push_back(std::async(std::launch::async, [&, c] {
                Rng rng = make_rng(seed, static_cast<std::uint64_t>(c));
                return detail::run_chain(data, env, cfg, per_chain, rng);
            }));
        for (int c = 0; c < cfg.chains; ++c) chains[c] = futs[c].get();
    }

    PosteriorSampleSet out;
    SamplerProvenance& prov = out.provenance;
    prov.sampler = cfg.kind == SamplerKind::EllipticalSlice ? "elliptical_slice" : "metropolis";
    prov.warmup_steps = cfg.warmup_steps;
    prov.kept_samples = cfg.kept_samples;
    prov.thin_to = cfg.thin_to;
    prov.seed = seed;
    prov.acceptance_rate = 0.0;
    prov.mean_evals_per_step = 0.0;
    for (auto& ch : chains) {
        for (std::size_t i = 0; i < ch.samples.size(); ++i) {
            out.samples.push_back(std::move(ch.samples[i]));
            out.q_cache.push_back(std::move(ch.q[i]));
        }
        prov.acceptance_rate += ch.acceptance / cfg.chains;
        prov.mean_evals_per_step += ch.evals_per_step / cfg.chains;
        prov.final_scale = ch.scales;
    }
    if (cfg.kind == SamplerKind::Metropolis && prov.acceptance_rate < 0.01) {
        prov.warnings.push_back("acceptance rate below 1% after warmup");
        spdlog::warn("posterior sampler: acceptance rate {:.4f} below 1%", prov.acceptance_rate);
    }
    // Thin within each chain so every chain contributes equally.
    for (int c = 0; c < cfg.chains; ++c)
        for (std::size_t i : thin_indices(per_chain, cfg.thin_to / cfg.chains + (c < cfg.thin_to % cfg.chains)))
            out.thinned_index.push_back(static_cast<std::size_t>(c) * per_chain + i);
    return out;
}

/// Kozachenko-Leonenko entropy (nats) of all kept samples.
inline EntropyEstimate posterior_entropy_estimate(const PosteriorSampleSet& set, int k = 5) {
    return knn_entropy(set.flat(), set.dim(), k);
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

/// Posterior evaluated on a regular grid of cell centres over the prior range.
struct GridPosterior {
    int dim = 0;
    int resolution = 0;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> cell_prob;               // row-major, last dimension fastest
    std::vector<std::vector<double>> marginals;  // [dim][resolution]
    std::size_t map_cell = 0;
    std::vector<double> log_post;                // unnormalized, per cell

    double centre(int d, int i) const {
        return lower[d] + (i + 0.5) * (upper[d] - lower[d]) / resolution;
    }
    std::vector<int> cell_coords(std::size_t cell) const {
        std::vector<int> c(dim);
        for (int d = dim - 1; d >= 0; --d) {
            c[d] = static_cast<int>(cell % resolution);
            cell /= resolution;
        }
        return c;
    }
    std::vector<double> cell_centre(std::size_t cell) const {
        const auto c = cell_coords(cell);
        std::vector<double> t(dim);
        for (int d = 0; d < dim; ++d) t[d] = centre(d, c[d]);
        return t;
    }
};

inline GridPosterior grid_oracle_posterior(const DemoDataset& data, const Environment& env, double beta,
                                           int resolution, double vi_tol = 1e-6) {
    const int dim = env.prior.dim();
    if (dim > 3) throw InputError("grid oracle refuses more than 3 parameters");
    if (resolution < 1) throw InputError("grid resolution must be positive");
    GridPosterior g;
    g.dim = dim;
    g.resolution = resolution;
    for (int d = 0; d < dim; ++d) {
        g.lower.push_back(env.prior.lower(d));
        g.upper.push_back(env.prior.upper(d));
    }
    std::size_t cells = 1;
    for (int d = 0; d < dim; ++d) cells *= resolution;
    g.log_post.resize(cells);
    const DemoCounts counts = DemoCounts::from(data, env.mdp.num_states, env.mdp.num_actions);
    std::optional<QFunction> prev;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const auto theta = g.cell_centre(cell);
        double lp = env.prior.log_density(theta);
        if (std::isfinite(lp) && !data.empty()) {
            QFunction q = value_iteration(env.mdp, env.reward_map.state_rewards(theta), vi_tol,
                                          prev ? &*prev : nullptr);
            lp += counts.log_likelihood(q, beta);
            prev = std::move(q);
        }
        g.log_post[cell] = lp;
    }
    const double log_z = log_sum_exp(g.log_post);
    g.cell_prob.resize(cells);
    g.marginals.assign(dim, std::vector<double>(resolution, 0.0));
    for (std::size_t cell = 0; cell < cells; ++cell) {
        g.cell_prob[cell] = std::exp(g.log_post[cell] - log_z);
        const auto c = g.cell_coords(cell);
        for (int d = 0; d < dim; ++d) g.marginals[d][c[d]] += g.cell_prob[cell];
        if (g.log_post[cell] > g.log_post[g.map_cell]) g.map_cell = cell;
    }
    return g;
}

/// Per-dimension histogram of samples on `bins` equal-width bins over [lo, hi];
/// samples outside are clamped to the edge bins.
inline std::vector<double> marginal_histogram(const PosteriorSampleSet& set, int d, double lo, double hi,
                                              int bins) {
    std::vector<double> h(bins, 0.0);
    for (const auto& s : set.samples) {
        int b = static_cast<int>(std::floor((s[d] - lo) / (hi - lo) * bins));
        h[std::clamp(b, 0, bins - 1)] += 1.0;
    }
    for (auto& v : h) v /= static_cast<double>(set.size());
    return h;
}

/// Sums consecutive groups of `factor` bins.
inline std::vector<double> coarsen(std::span<const double> hist, int factor) {
    std::vector<double> out((hist.size() + factor - 1) / factor, 0.0);
    for (std::size_t i = 0; i < hist.size(); ++i) out[i / factor] += hist[i];
    return out;
}

inline double total_variation(std::span<const double> p, std::span<const double> q) {
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
    return 0.5 * tv;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// One sample per row, comma-separated, header row naming the parameters.
inline void write_samples_csv(std::ostream& out, const PosteriorSampleSet& set,
                              const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << '\n';
    out.precision(17);
    for (const auto& s : set.samples) {
        for (std::size_t i = 0; i < s.size(); ++i) out << (i ? "," : "") << s[i];
        out << '\n';
    }
}

inline PosteriorSampleSet read_samples_csv(std::istream& in, std::vector<std::string>* names = nullptr) {
    PosteriorSampleSet set;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("sample file is empty");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        Theta t;
        while (std::getline(ss, cell, ',')) t.push_back(std::stod(cell));
        if (t.size() != header.size()) throw ConfigError("sample row width does not match header");
        set.samples.push_back(std::move(t));
    }
    if (names != nullptr) *names = std::move(header);
    return set;
}

}  // namespace airl
