#pragma once

// Reference implementations used only by tests. They evaluate the losses
// straight from their definitions in long double, with no shared code path
// with the library beyond the data containers.

#include "coreset/dataset.hpp"
#include "coreset/losses.hpp"

#include <cmath>
#include <vector>

namespace oracle {

inline long double phi(coreset::Phi p, long double t) {
    switch (p) {
    case coreset::Phi::sigmoid: return 1.0L / (1.0L + std::exp(t));
    case coreset::Phi::logistic: return t > 0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
    case coreset::Phi::svm: return t < 1 ? 1.0L - t : 0.0L;
    case coreset::Phi::relu: return t > 0 ? t : 0.0L;
    }
    return 0;
}

inline long double dot(const double* a, const double* b, std::size_t d) {
    long double s = 0;
    for (std::size_t i = 0; i < d; ++i) s += static_cast<long double>(a[i]) * b[i];
    return s;
}

//! phi(<x,w>) + |w|^2/k for the linear kernel; with `shifted` the kernel is
//! 1 + <x,w> and the regularizer (1 + |w|^2)/k.
inline long double loss(coreset::Phi p, double k, const double* x, const double* w, std::size_t d,
                        bool shifted = false) {
    const long double ww = dot(w, w, d) + (shifted ? 1.0L : 0.0L);
    return phi(p, dot(x, w, d) + (shifted ? 1.0L : 0.0L)) + ww / k;
}

//! max over the given parameters of l(x_i, w) / mean_j l(x_j, w), per point.
template <class Loss>
std::vector<long double> empirical_sensitivity(const coreset::Dataset& data, const std::vector<std::vector<double>>& ws,
                                               Loss&& l) {
    const std::size_t n = data.size(), d = data.dim();
    const coreset::Vector p = data.probabilities();
    std::vector<long double> best(n, 0.0L), f(n);
    for (const auto& w : ws) {
        long double mean = 0;
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = l(data.point(i).data(), w.data(), d);
            mean += p[static_cast<Eigen::Index>(i)] * f[i];
        }
        for (std::size_t i = 0; i < n; ++i) best[i] = std::max(best[i], f[i] / mean);
    }
    return best;
}

//! Max of the beta ratio over z in {0, dz, ..., zmax}.
inline long double beta_grid_max(coreset::Phi p, double alpha, double k, double zmax, std::size_t points) {
    long double best = 0;
    for (std::size_t j = 0; j < points; ++j) {
        const long double z = zmax * static_cast<long double>(j) / static_cast<long double>(points - 1);
        const long double reg = z * z / k;
        best = std::max(best, (phi(p, -alpha * z) + reg) / (phi(p, alpha * z) + reg));
    }
    return best;
}

} // namespace oracle
