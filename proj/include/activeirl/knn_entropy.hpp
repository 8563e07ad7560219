#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "activeirl/common.hpp"

namespace airl {

struct EntropyEstimate {
    double nats = 0.0;
    bool jittered = false;
};

namespace detail {

// psi(n) for positive integers.
inline double digamma_int(int n) {
    double h = -0.57721566490153286061;
    for (int j = 1; j < n; ++j) h += 1.0 / j;
    return h;
}

inline double log_unit_ball_volume(int d) {
    return 0.5 * d * std::log(M_PI) - std::lgamma(0.5 * d + 1.0);
}

// Squared distance from each point to its k-th nearest neighbour.
inline std::vector<double> kth_nn_sq_dist(std::span<const double> pts, int n, int d, int k) {
    std::vector<double> out(n);
    if (d == 1) {
        std::vector<double> x(pts.begin(), pts.end());
        std::sort(x.begin(), x.end());
        std::vector<double> buf;
        for (int i = 0; i < n; ++i) {
            buf.clear();
            for (int j = std::max(0, i - k); j <= std::min(n - 1, i + k); ++j)
                if (j != i) buf.push_back((x[j] - x[i]) * (x[j] - x[i]));
            std::nth_element(buf.begin(), buf.begin() + (k - 1), buf.end());
            out[i] = buf[k - 1];
        }
        // The sorted order differs from the input order, which is fine for a sum.
        return out;
    }
    std::vector<double> buf(n - 1);
    for (int i = 0; i < n; ++i) {
        const double* pi = pts.data() + static_cast<std::size_t>(i) * d;
        int m = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double* pj = pts.data() + static_cast<std::size_t>(j) * d;
            double acc = 0.0;
            for (int c = 0; c < d; ++c) acc += (pi[c] - pj[c]) * (pi[c] - pj[c]);
            buf[m++] = acc;
        }
        std::nth_element(buf.begin(), buf.begin() + (k - 1), buf.end());
        out[i] = buf[k - 1];
    }
    return out;
}

}  // namespace detail

/// Kozachenko-Leonenko k-nearest-neighbour differential entropy (nats) of
/// `n = points.size() / dim` row-major samples, Euclidean metric.
///
/// Samples are centred first. If any point has a zero k-th neighbour distance
/// the set is perturbed with N(0, 1e-9^2) noise from a fixed stream, so
/// identical inputs always produce identical (floor) values.
inline EntropyEstimate knn_entropy(std::span<const double> points, int dim, int k = 5) {
    if (dim <= 0 || points.size() % static_cast<std::size_t>(dim) != 0)
        throw InputError("point buffer is not a multiple of the dimension");
    const int n = static_cast<int>(points.size() / dim);
    if (k < 1 || n < k + 1) throw InputError("kNN entropy needs at least k+1 samples");

    std::vector<double> centred(points.begin(), points.end());
    for (int c = 0; c < dim; ++c) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += centred[static_cast<std::size_t>(i) * dim + c];
        mean /= n;
        for (int i = 0; i < n; ++i) centred[static_cast<std::size_t>(i) * dim + c] -= mean;
    }

    EntropyEstimate est;
    auto dist = detail::kth_nn_sq_dist(centred, n, dim, k);
    if (std::any_of(dist.begin(), dist.end(), [](double v) { return v <= 0.0; })) {
        spdlog::warn("kNN entropy: duplicate samples, adding 1e-9 jitter");
        Rng rng{0x11773355ULL};
        std::normal_distribution<double> noise(0.0, 1e-9);
        for (auto& v : centred) v += noise(rng);
        dist = detail::kth_nn_sq_dist(centred, n, dim, k);
        est.jittered = true;
    }
    double sum_log = 0.0;
    for (double d2 : dist) sum_log += 0.5 * std::log(std::max(d2, 1e-300));
    est.nats = detail::digamma_int(n) - detail::digamma_int(k) + detail::log_unit_ball_volume(dim) +
               static_cast<double>(dim) * sum_log / n;
    return est;
}

}  // namespace airl
