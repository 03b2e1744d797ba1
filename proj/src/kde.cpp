#include "coreset/eval.hpp"

#include "coreset/error.hpp"
#include "coreset/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coreset {

namespace {

void check_kde_kernel(const Kernel& kernel) {
    kernel.validate();
    if (!kernel.is_normalized())
        fail(ErrorKind::precondition, "KDE needs a kernel with values in (0, 1]", "kernel");
}

struct Evaluator {
    const Kernel& kernel;
    const Matrix& points;
    Vector weights; // normalized

    Evaluator(const Kernel& k, const Matrix& p, const Vector& w) : kernel(k), points(p), weights(w / w.sum()) {}

    // Value and gradient at w.
    double value_grad(const Vector& w, Vector& grad) const {
        const Eigen::Index n = points.rows();
        Matrix diff = (-points).rowwise() + w.transpose(); // w - x_i
        Eigen::ArrayXd kv(n);
        grad.setZero(w.size());
        const double h = kernel.bandwidth;
        switch (kernel.kind) {
        case KernelKind::gaussian: {
            kv = (-diff.rowwise().squaredNorm().array() / (h * h)).exp();
            const Eigen::ArrayXd c = weights.array() * kv;
            grad = (-2.0 / (h * h)) * (diff.transpose() * c.matrix());
            break;
        }
        case KernelKind::exponential: {
            const Eigen::ArrayXd r = diff.rowwise().norm().array();
            kv = (-r / h).exp();
            const Eigen::ArrayXd c = (r > 0.0).select(weights.array() * kv / (h * r), 0.0);
            grad = -(diff.transpose() * c.matrix());
            break;
        }
        case KernelKind::laplacian: {
            kv = (-diff.cwiseAbs().rowwise().sum().array() / h).exp();
            const Eigen::ArrayXd c = weights.array() * kv / h;
            grad = -(diff.array().sign().matrix().transpose() * c.matrix());
            break;
        }
        default:
            fail(ErrorKind::precondition, "KDE needs a kernel with values in (0, 1]", "kernel");
        }
        return (weights.array() * kv).sum();
    }
};

} // namespace

double kde_value(const Kernel& kernel, const Matrix& points, const Vector& weights, Point w) {
    if (w.size() != static_cast<std::size_t>(points.cols()))
        fail(ErrorKind::dimension_mismatch, "query has the wrong dimension", "w");
    Matrix q = as_eigen(w).transpose();
    return kde_values(kernel, points, weights, q)[0];
}

Vector kde_values(const Kernel& kernel, const Matrix& points, const Vector& weights, const Matrix& probes) {
    check_kde_kernel(kernel);
    if (points.rows() != weights.size())
        fail(ErrorKind::dimension_mismatch, "weights and points differ in length", "weights");
    if (points.cols() != probes.cols())
        fail(ErrorKind::dimension_mismatch, "probes and points differ in dimension", "probes");
    // Tiles small enough to stay in cache; the kernel is applied in place.
    constexpr Eigen::Index point_block = 1024, probe_block = 256;
    const Vector pn = points.rowwise().squaredNorm();
    const Vector qn = probes.rowwise().squaredNorm();
    const double h = kernel.bandwidth;
    Vector acc = Vector::Zero(probes.rows());
    Matrix buf(point_block, probe_block);
    for (Eigen::Index q0 = 0; q0 < probes.rows(); q0 += probe_block) {
        const Eigen::Index ql = std::min(probe_block, probes.rows() - q0);
        const auto q = probes.middleRows(q0, ql);
        for (Eigen::Index p0 = 0; p0 < points.rows(); p0 += point_block) {
            const Eigen::Index pl = std::min(point_block, points.rows() - p0);
            auto b = buf.topLeftCorner(pl, ql);
            if (kernel.kind == KernelKind::laplacian) {
                b = kernel_matrix(kernel, points.middleRows(p0, pl), q);
            } else {
                b.noalias() = points.middleRows(p0, pl) * q.transpose();
                b *= -2.0;
                b.colwise() += pn.segment(p0, pl);
                b.rowwise() += qn.segment(q0, ql).transpose();
                if (kernel.kind == KernelKind::gaussian)
                    b = (b.array().max(0.0) * (-1.0 / (h * h))).exp().matrix();
                else
                    b = (b.array().max(0.0).sqrt() * (-1.0 / h)).exp().matrix();
            }
            acc.segment(q0, ql).noalias() += b.transpose() * weights.segment(p0, pl);
        }
    }
    return acc / weights.sum();
}

Matrix make_kde_probes(const Dataset& full, const Coreset& sample, std::size_t count, std::uint64_t seed) {
    if (sample.dim() != full.dim()) fail(ErrorKind::dimension_mismatch, "sample and data differ in dimension", "sample");
    if (sample.size() == 0) fail(ErrorKind::precondition, "empty sample", "sample");
    const auto d = static_cast<Eigen::Index>(full.dim());
    Matrix probes(static_cast<Eigen::Index>(count), d);
    Philox rng(seed);
    const auto pick = [&](std::size_t n) {
        return static_cast<Eigen::Index>(std::min<std::uint64_t>(
            n - 1, static_cast<std::uint64_t>(rng.uniform() * static_cast<double>(n))));
    };
    double radius = 0.0;
    for (Eigen::Index i = 0; i < full.points().rows(); ++i) radius = std::max(radius, full.points().row(i).norm());
    Vector g(d);
    for (std::size_t j = 0; j < count; ++j) {
        auto out = probes.row(static_cast<Eigen::Index>(j));
        switch (j % 4) {
        case 0:
            out = full.points().row(pick(full.size()));
            break;
        case 1:
            out = sample.points.row(pick(sample.size()));
            break;
        case 2:
            out = 0.5 * (full.points().row(pick(full.size())) + full.points().row(pick(full.size())));
            break;
        default: {
            double n = 0.0;
            while (n == 0.0) {
                for (auto& v : g) v = rng.normal();
                n = g.norm();
            }
            const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
            out = (r / n) * g.transpose();
        }
        }
    }
    return probes;
}

KdeSupError kde_sup_error(const Dataset& full, const Coreset& sample, const Kernel& kernel, const Matrix& probes,
                          const KdeOptions& options) {
    check_kde_kernel(kernel);
    if (probes.rows() == 0) fail(ErrorKind::precondition, "no probes", "probes");
    if (sample.weights.size() == 0) fail(ErrorKind::precondition, "empty sample", "sample");
    if ((sample.weights.array() != sample.weights[0]).any())
        fail(ErrorKind::precondition, "KDE sup error needs a uniform-weight sample", "sample");

    const Vector pf = full.probabilities();
    const Vector diff = kde_values(kernel, full.points(), pf, probes) -
                        kde_values(kernel, sample.points, sample.weights, probes);
    const Eigen::ArrayXd gap = diff.array().abs();

    KdeSupError out;
    Eigen::Index best = 0;
    out.probe_value = gap.maxCoeff(&best);
    out.value = out.probe_value;
    out.argmax = probes.row(best).transpose();
    if (options.refine_starts == 0 || options.refine_iterations == 0) return out;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(probes.rows()));
    std::iota(order.begin(), order.end(), 0);
    const std::size_t starts = std::min(options.refine_starts, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(starts), order.end(),
                      [&](Eigen::Index a, Eigen::Index b) { return gap[a] > gap[b] || (gap[a] == gap[b] && a < b); });

    const Evaluator fe(kernel, full.points(), pf);
    const Evaluator se(kernel, sample.points, sample.weights);
    Vector gf, gs;
    const auto objective = [&](const Vector& w, double sign, Vector& grad) {
        const double v = fe.value_grad(w, gf) - se.value_grad(w, gs);
        grad = sign * (gf - gs);
        return sign * v;
    };

    for (std::size_t s = 0; s < starts; ++s) {
        Vector w = probes.row(order[s]).transpose();
        const double sign = diff[order[s]] >= 0.0 ? 1.0 : -1.0;
        Vector grad, trial_grad;
        double value = objective(w, sign, grad);
        double step = 0.1 * kernel.bandwidth;
        for (std::size_t it = 0; it < options.refine_iterations && step > 1e-6 * kernel.bandwidth; ++it) {
            const double gn = grad.norm();
            if (!(gn > 0.0)) break;
            const Vector trial = w + (step / gn) * grad;
            const double tv = objective(trial, sign, trial_grad);
            if (tv > value) {
                w = trial;
                value = tv;
                grad = trial_grad;
                step *= 1.5;
            } else {
                step *= 0.5;
            }
        }
        if (value > out.value) {
            out.value = value;
            out.argmax = w;
        }
    }
    return out;
}

} // namespace coreset
