#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <spdlog/spdlog.h>

namespace airl {

using Rng = std::mt19937_64;

/// Malformed configuration or layout data.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate an operation's preconditions.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// SplitMix64 finalizer. Used to derive independent, schedule-free random
/// streams from a master seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix_seed(mix_seed(master) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
    return Rng{derive_seed(master, stream)};
}

inline double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - m);
    return m + std::log(acc);
}

/// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Draws an index from an unnormalized discrete distribution given by `weights`.
inline std::size_t sample_discrete(std::span<const double> weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01(rng) * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        u -= weights[i];
        if (u < 0.0) return i;
    }
    // Round-off: return the last index with positive mass.
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0.0) return i;
    return weights.size() - 1;
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads (0 = hardware
/// concurrency). Each index is handled exactly once; fn must be thread-safe.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += jobs) fn(i);
        });
    for (auto& t : pool) t.join();
}

/// Configures the default logger from the IRL_LOG environment variable
/// (trace, debug, info, warn, error, off). Defaults to warn.
inline void init_logging_from_env() {
    const char* env = std::getenv("IRL_LOG");
    auto level = spdlog::level::warn;
    if (env != nullptr && *env != '\0') level = spdlog::level::from_str(env);
    spdlog::set_level(level);
}

}  // namespace airl
