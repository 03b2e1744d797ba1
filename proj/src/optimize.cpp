#include "coreset/eval.hpp"

#include "coreset/error.hpp"

#include <cmath>
#include <limits>

namespace coreset {

namespace {

void check_smooth_spec(const LossSpec& spec, const Matrix& points, const Vector& weights, const Vector& w) {
    spec.validate();
    if (spec.kernel.kind != KernelKind::linear)
        fail(ErrorKind::unsupported, "the optimizer supports the linear kernel only", "kernel");
    if (spec.phi == Phi::relu) fail(ErrorKind::unsupported, "the optimizer does not handle relu", "loss");
    if (points.rows() != weights.size())
        fail(ErrorKind::dimension_mismatch, "weights and points differ in length", "weights");
    if (points.cols() != w.size()) fail(ErrorKind::dimension_mismatch, "w has the wrong dimension", "w");
}

Eigen::ArrayXd margins(const LossSpec& spec, const Matrix& points, const Vector& w) {
    Eigen::ArrayXd t = (points * w).array();
    return spec.sign == Sign::plus ? t : Eigen::ArrayXd(-t);
}

Eigen::ArrayXd phi_values(Phi phi, const Eigen::ArrayXd& t) {
    switch (phi) {
    case Phi::sigmoid: return 1.0 / (1.0 + t.exp());
    case Phi::logistic: return (-t).max(0.0) + (-t.abs()).exp().log1p();
    case Phi::svm: return (1.0 - t).max(0.0);
    case Phi::relu: return t.max(0.0);
    }
    return t;
}

Eigen::ArrayXd phi_derivatives(Phi phi, const Eigen::ArrayXd& t) {
    switch (phi) {
    case Phi::sigmoid: {
        const Eigen::ArrayXd e = (-t.abs()).exp();
        return -e / ((1.0 + e) * (1.0 + e));
    }
    case Phi::logistic:
        return -1.0 / (1.0 + t.exp());
    case Phi::svm:
        return (t < 1.0).select(Eigen::ArrayXd::Constant(t.size(), -1.0), 0.0);
    case Phi::relu:
        return (t > 0.0).select(Eigen::ArrayXd::Ones(t.size()), 0.0);
    }
    return t;
}

// Bound on |phi''|; the objective's gradient is Lipschitz with constant
// sum_u (c E_u|x|^2 + 2/k).
double curvature_bound(Phi phi) { return phi == Phi::logistic ? 0.25 : 0.1; }

} // namespace

double reg_objective(const LossSpec& spec, const Matrix& points, const Vector& weights, const Vector& w) {
    check_smooth_spec(spec, points, weights, w);
    const Eigen::ArrayXd f = phi_values(spec.phi, margins(spec, points, w));
    return (weights.array() * f).sum() + weights.sum() * w.squaredNorm() / spec.k;
}

Vector reg_gradient(const LossSpec& spec, const Matrix& points, const Vector& weights, const Vector& w) {
    check_smooth_spec(spec, points, weights, w);
    Eigen::ArrayXd g = weights.array() * phi_derivatives(spec.phi, margins(spec, points, w));
    if (spec.sign == Sign::minus) g = -g;
    return points.transpose() * g.matrix() + (2.0 * weights.sum() / spec.k) * w;
}

Vector minimize_reg_loss(const LossSpec& spec, const Matrix& points, const Vector& weights, const Vector& init,
                         const OptimizerOptions& options) {
    check_smooth_spec(spec, points, weights, init);
    const double total = weights.sum();
    if (!(total > 0.0)) fail(ErrorKind::precondition, "weights must have positive sum", "weights");
    const double mean_sq = (weights.array() * points.rowwise().squaredNorm().array()).sum() / total;

    Vector w = init;
    if (spec.phi != Phi::svm) {
        const double step =
            options.step_size.value_or(1.0 / (total * (curvature_bound(spec.phi) * mean_sq + 2.0 / spec.k)));
        for (std::size_t t = 0; t < options.steps; ++t) {
            w -= step * reg_gradient(spec, points, weights, w);
            if (!w.allFinite())
                fail(ErrorKind::numeric, "optimizer diverged at step " + std::to_string(t), "step_size", t);
        }
        return w;
    }

    // Subgradient method: the objective is (2/k)-strongly convex but not smooth.
    const double step0 =
        options.step_size.value_or(1.0 / (total * (std::sqrt(mean_sq) + 2.0 / spec.k)));
    Vector best = w;
    double best_value = reg_objective(spec, points, weights, w);
    for (std::size_t t = 0; t < options.steps; ++t) {
        w -= (step0 / std::sqrt(static_cast<double>(t + 1))) * reg_gradient(spec, points, weights, w);
        if (!w.allFinite())
            fail(ErrorKind::numeric, "optimizer diverged at step " + std::to_string(t), "step_size", t);
        const double v = reg_objective(spec, points, weights, w);
        if (v < best_value) {
            best_value = v;
            best = w;
        }
    }
    return best;
}

} // namespace coreset
