#include "coreset/losses.hpp"

#include "coreset/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace coreset {

namespace {

using ConstRef = Eigen::Ref<const Matrix>;

void check_dims(std::size_t a, std::size_t b, std::string_view what) {
    if (a != b)
        fail(ErrorKind::dimension_mismatch,
             std::string(what) + ": dimension " + std::to_string(a) + " vs " + std::to_string(b));
}

double dot(Point x, Point w) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * w[i];
    return s;
}

double sq_dist(Point x, Point w) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - w[i];
        s += d * d;
    }
    return s;
}

Matrix kernel_block(const Kernel& kernel, const ConstRef& x, const Matrix& w) {
    switch (kernel.kind) {
    case KernelKind::linear:
        return x * w.transpose();
    case KernelKind::shifted_linear:
        return (x * w.transpose()).array() + 1.0;
    case KernelKind::gaussian:
    case KernelKind::exponential: {
        Matrix d2 = -2.0 * (x * w.transpose());
        d2.colwise() += x.rowwise().squaredNorm();
        d2.rowwise() += w.rowwise().squaredNorm().transpose();
        d2 = d2.cwiseMax(0.0);
        const double h = kernel.bandwidth;
        if (kernel.kind == KernelKind::gaussian) return (-d2.array() / (h * h)).exp().matrix();
        return (-d2.array().sqrt() / h).exp().matrix();
    }
    case KernelKind::laplacian: {
        Matrix out(x.rows(), w.rows());
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < w.rows(); ++j)
                out(i, j) = std::exp(-(x.row(i) - w.row(j)).lpNorm<1>() / kernel.bandwidth);
        return out;
    }
    }
    fail(ErrorKind::unsupported, "unknown kernel");
}

template <class A>
auto phi_array(Phi phi, const A& t) -> Eigen::ArrayXXd {
    switch (phi) {
    case Phi::sigmoid:
        return 1.0 / (1.0 + t.exp());
    case Phi::logistic:
        return (-t).max(0.0) + (-t.abs()).exp().log1p();
    case Phi::svm:
        return (1.0 - t).max(0.0);
    case Phi::relu:
        return t.max(0.0);
    }
    fail(ErrorKind::unsupported, "unknown link function");
}

double parse_double(std::string_view s, std::string_view field) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end)
        fail(ErrorKind::config, "not a number: '" + std::string(s) + "'", std::string(field));
    return v;
}

} // namespace

void Kernel::validate() const {
    if (is_normalized() && !(bandwidth > 0.0 && std::isfinite(bandwidth)))
        fail(ErrorKind::domain, "kernel bandwidth must be positive and finite", "bandwidth");
}

void LossSpec::validate() const {
    if (!(k > 0.0 && std::isfinite(k))) fail(ErrorKind::domain, "k must be positive and finite", "k");
    kernel.validate();
    if (phi == Phi::relu && kernel.kind != KernelKind::linear)
        fail(ErrorKind::unsupported, "relu loss is defined for the linear kernel only", "kernel");
    if (phi == Phi::relu && sign != Sign::plus)
        fail(ErrorKind::unsupported, "relu loss takes no sign; negate w instead", "sign");
}

std::string_view to_string(Phi phi) {
    switch (phi) {
    case Phi::sigmoid: return "sigmoid";
    case Phi::logistic: return "logistic";
    case Phi::svm: return "svm";
    case Phi::relu: return "relu";
    }
    return "?";
}

std::string_view to_string(KernelKind kind) {
    switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::gaussian: return "gaussian";
    case KernelKind::laplacian: return "laplacian";
    case KernelKind::exponential: return "exponential";
    case KernelKind::shifted_linear: return "shifted-linear";
    }
    return "?";
}

Phi parse_phi(std::string_view name) {
    for (Phi p : {Phi::sigmoid, Phi::logistic, Phi::svm, Phi::relu})
        if (name == to_string(p)) return p;
    fail(ErrorKind::config, "unknown loss '" + std::string(name) + "'", "loss");
}

Kernel parse_kernel(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    Kernel kernel;
    bool found = false;
    for (KernelKind k : {KernelKind::linear, KernelKind::gaussian, KernelKind::laplacian,
                         KernelKind::exponential, KernelKind::shifted_linear}) {
        if (name == to_string(k)) {
            kernel.kind = k;
            found = true;
        }
    }
    if (!found) fail(ErrorKind::config, "unknown kernel '" + std::string(name) + "'", "kernel");
    if (colon != std::string_view::npos) {
        std::string_view arg = text.substr(colon + 1);
        if (!kernel.is_normalized())
            fail(ErrorKind::config, "kernel '" + std::string(name) + "' takes no parameters", "kernel");
        if (arg.starts_with("bw=")) arg.remove_prefix(3);
        kernel.bandwidth = parse_double(arg, "kernel");
    }
    kernel.validate();
    return kernel;
}

std::string describe(const Kernel& kernel) {
    std::string s(to_string(kernel.kind));
    if (kernel.is_normalized()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", kernel.bandwidth);
        s += ":bw=";
        s += buf;
    }
    return s;
}

double phi_value(Phi phi, double t) {
    if (!std::isfinite(t)) fail(ErrorKind::domain, "link argument must be finite", "t");
    switch (phi) {
    case Phi::sigmoid:
        return 1.0 / (1.0 + std::exp(t));
    case Phi::logistic:
        return std::max(0.0, -t) + std::log1p(std::exp(-std::abs(t)));
    case Phi::svm:
        return std::max(0.0, 1.0 - t);
    case Phi::relu:
        return std::max(0.0, t);
    }
    fail(ErrorKind::unsupported, "unknown link function");
}

double phi_derivative(Phi phi, double t) {
    switch (phi) {
    case Phi::sigmoid: {
        // -e^t/(1+e^t)^2 written via e^{-|t|} to avoid inf/inf.
        const double e = std::exp(-std::abs(t));
        return -e / ((1.0 + e) * (1.0 + e));
    }
    case Phi::logistic:
        // -1/(1+e^t)
        return t >= 0.0 ? -std::exp(-t) / (1.0 + std::exp(-t)) : -1.0 / (1.0 + std::exp(t));
    case Phi::svm:
        return t < 1.0 ? -1.0 : 0.0;
    case Phi::relu:
        return t > 0.0 ? 1.0 : 0.0;
    }
    fail(ErrorKind::unsupported, "unknown link function");
}

double kernel_value(const Kernel& kernel, Point x, Point w) {
    check_dims(x.size(), w.size(), "kernel_value");
    switch (kernel.kind) {
    case KernelKind::linear:
        return dot(x, w);
    case KernelKind::shifted_linear:
        return 1.0 + dot(x, w);
    case KernelKind::gaussian:
        return std::exp(-sq_dist(x, w) / (kernel.bandwidth * kernel.bandwidth));
    case KernelKind::exponential:
        return std::exp(-std::sqrt(sq_dist(x, w)) / kernel.bandwidth);
    case KernelKind::laplacian: {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - w[i]);
        return std::exp(-s / kernel.bandwidth);
    }
    }
    fail(ErrorKind::unsupported, "unknown kernel");
}

double rkhs_norm_sq(const Kernel& kernel, Point x) {
    switch (kernel.kind) {
    case KernelKind::linear: return dot(x, x);
    case KernelKind::shifted_linear: return 1.0 + dot(x, x);
    default: return 1.0;
    }
}

double reg_loss(const LossSpec& spec, Point x, Point w) {
    if (spec.phi == Phi::relu) fail(ErrorKind::unsupported, "use relu_loss for the relu link", "loss");
    const double kv = kernel_value(spec.kernel, x, w);
    const double t = spec.sign == Sign::plus ? kv : -kv;
    return phi_value(spec.phi, t) + rkhs_norm_sq(spec.kernel, w) / spec.k;
}

double relu_loss(double k, Point x, Point w) {
    check_dims(x.size(), w.size(), "relu_loss");
    return std::max(0.0, dot(x, w)) + dot(w, w) / k;
}

double pointwise_loss(const LossSpec& spec, Point x, Point w) {
    return spec.phi == Phi::relu ? relu_loss(spec.k, x, w) : reg_loss(spec, x, w);
}

double empirical_mean_loss(const LossSpec& spec, const Matrix& points, const Vector& weights, Point w) {
    check_dims(static_cast<std::size_t>(points.rows()), static_cast<std::size_t>(weights.size()),
               "empirical_mean_loss weights");
    double num = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) num += weights[i] * pointwise_loss(spec, row(points, i), w);
    return num / weights.sum();
}

Matrix kernel_matrix(const Kernel& kernel, const Matrix& points, const Matrix& params) {
    check_dims(static_cast<std::size_t>(points.cols()), static_cast<std::size_t>(params.cols()), "kernel_matrix");
    return kernel_block(kernel, points, params);
}

namespace {

Vector regularizers(const LossSpec& spec, const Matrix& params) {
    Vector reg(params.rows());
    for (Eigen::Index j = 0; j < params.rows(); ++j) {
        const Point w = row(params, j);
        reg[j] = (spec.phi == Phi::relu ? dot(w, w) : rkhs_norm_sq(spec.kernel, w)) / spec.k;
    }
    return reg;
}

} // namespace

Matrix loss_matrix(const LossSpec& spec, const Matrix& points, const Matrix& params) {
    check_dims(static_cast<std::size_t>(points.cols()), static_cast<std::size_t>(params.cols()), "loss_matrix");
    Eigen::ArrayXXd t = kernel_block(spec.kernel, points, params).array();
    if (spec.sign == Sign::minus) t = -t;
    Matrix out = phi_array(spec.phi, t).matrix();
    out.rowwise() += regularizers(spec, params).transpose();
    return out;
}

Vector weighted_loss_sums(const LossSpec& spec, const Matrix& points, const Vector& weights,
                          const Matrix& params) {
    check_dims(static_cast<std::size_t>(points.cols()), static_cast<std::size_t>(params.cols()),
               "weighted_loss_sums");
    check_dims(static_cast<std::size_t>(points.rows()), static_cast<std::size_t>(weights.size()),
               "weighted_loss_sums weights");
    constexpr Eigen::Index block = 1024;
    Vector sums = Vector::Zero(params.rows());
    for (Eigen::Index start = 0; start < points.rows(); start += block) {
        const Eigen::Index len = std::min(block, points.rows() - start);
        Eigen::ArrayXXd t = kernel_block(spec.kernel, points.middleRows(start, len), params).array();
        if (spec.sign == Sign::minus) t = -t;
        sums.noalias() += phi_array(spec.phi, t).matrix().transpose() * weights.segment(start, len);
    }
    sums += weights.sum() * regularizers(spec, params);
    return sums;
}

} // namespace coreset
