#include "coreset/sensitivity.hpp"

#include "coreset/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace coreset {

namespace {

void check_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v))
        fail(ErrorKind::domain, std::string(field) + " must be positive and finite", field);
}

// Relative slack for comparing squared norms computed along different
// summation orders.
constexpr double kNormSlack = 1e-12;

std::vector<double> norms(const Dataset& data, const Kernel& kernel) {
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = std::sqrt(rkhs_norm_sq(kernel, data.point(i)));
    return out;
}

double sqrt_log_floor(double v) { return std::sqrt(std::max(1.0, std::log(v))); }

} // namespace

std::string_view to_string(ProfileSource source) {
    switch (source) {
    case ProfileSource::sigmoid: return "sigmoid";
    case ProfileSource::logistic_hard: return "logistic-hard";
    case ProfileSource::logistic_soft: return "logistic-soft";
    case ProfileSource::logistic_soft_simple: return "logistic-soft-simple";
    case ProfileSource::svm_hard: return "svm-hard";
    case ProfileSource::svm_soft: return "svm-soft";
    case ProfileSource::relu_hard: return "relu-hard";
    case ProfileSource::relu_soft: return "relu-soft";
    case ProfileSource::relu_soft_plain: return "relu-soft-plain";
    case ProfileSource::uniform: return "uniform";
    }
    return "?";
}

SensitivityProfile SensitivityProfile::make_constant(double value, std::size_t n, ProfileSource source) {
    if (!(value >= 1.0) || !std::isfinite(value))
        fail(ErrorKind::numeric, "sensitivity value must be finite and >= 1", "profile");
    SensitivityProfile p;
    p.values.assign(n, value);
    p.total = value;
    p.constant = true;
    p.source = source;
    return p;
}

SensitivityProfile SensitivityProfile::make(std::vector<double> values, const Vector& probabilities,
                                            ProfileSource source) {
    if (values.size() != static_cast<std::size_t>(probabilities.size()))
        fail(ErrorKind::dimension_mismatch, "profile and probabilities differ in length", "profile");
    if (values.empty()) fail(ErrorKind::precondition, "empty profile", "profile");
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 1.0) || !std::isfinite(values[i]))
            fail(ErrorKind::numeric, "sensitivity value must be finite and >= 1", "profile", i);
        total += probabilities[static_cast<Eigen::Index>(i)] * values[i];
    }
    SensitivityProfile p;
    p.constant = std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
    p.total = p.constant ? values.front() : std::max(1.0, total);
    p.values = std::move(values);
    p.source = source;
    return p;
}

double SensitivityProfile::max_value() const { return *std::max_element(values.begin(), values.end()); }
double SensitivityProfile::min_value() const { return *std::min_element(values.begin(), values.end()); }

double beta_sigmoid(double alpha, double k) {
    return 4.0 * (1.0 + std::max(std::numbers::e, alpha * alpha * k));
}

double beta_logistic(double alpha, double k) {
    const double K = alpha * alpha * k;
    return K >= std::numbers::e ? 85.0 * K / std::log(K) : 85.0;
}

double beta_svm(double alpha, double k) { return 1.0 + 2.0 * std::max(1.0, alpha * alpha * k); }

double beta_bound(Phi phi, double alpha, double k) {
    switch (phi) {
    case Phi::sigmoid: return beta_sigmoid(alpha, k);
    case Phi::logistic: return beta_logistic(alpha, k);
    case Phi::svm: return beta_svm(alpha, k);
    case Phi::relu: break;
    }
    fail(ErrorKind::unsupported, "no beta bound for relu", "loss");
}

double beta_ratio(Phi phi, double alpha, double z, double k) {
    const double reg = z * z / k;
    return (phi_value(phi, -alpha * z) + reg) / (phi_value(phi, alpha * z) + reg);
}

BetaGridResult verify_beta_grid(Phi phi, const BetaGrid& grid) {
    if (!(grid.step > 0.0) || !(grid.max >= 0.0)) fail(ErrorKind::config, "bad grid", "step");
    const auto steps = static_cast<std::uint64_t>(std::floor(grid.max / grid.step + 1e-9));
    BetaGridResult r;
    r.phi = phi;
    for (double k : grid.ks) {
        check_positive(k, "k");
        for (std::uint64_t i = 0; i <= steps; ++i) {
            const double alpha = static_cast<double>(i) * grid.step;
            const double beta = beta_bound(phi, alpha, k);
            for (std::uint64_t j = 0; j <= steps; ++j) {
                const double z = static_cast<double>(j) * grid.step;
                const double ratio = beta_ratio(phi, alpha, z, k);
                ++r.checked;
                if (!(ratio <= beta)) ++r.failures;
                const double q = ratio / beta;
                if (q > r.worst_ratio_over_beta || std::isnan(q)) {
                    r.worst_ratio_over_beta = q;
                    r.worst_alpha = alpha;
                    r.worst_z = z;
                    r.worst_k = k;
                }
            }
        }
    }
    return r;
}

double estimate_e1(const Dataset& data, const Kernel& kernel) {
    const Vector p = data.probabilities();
    double m2 = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        m2 += p[static_cast<Eigen::Index>(i)] * rkhs_norm_sq(kernel, data.point(i));
    return std::sqrt(m2);
}

double estimate_hard_bound(const Dataset& data, const Kernel& kernel) {
    double a = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) a = std::max(a, rkhs_norm_sq(kernel, data.point(i)));
    return std::sqrt(a);
}

void check_hard_bound(const Dataset& data, const Kernel& kernel, double a) {
    check_positive(a, "A");
    const double limit = a * a * (1.0 + kNormSlack);
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (rkhs_norm_sq(kernel, data.point(i)) > limit)
            fail(ErrorKind::precondition, "hard bound A violated at row " + std::to_string(i), "A", i);
    }
}

void check_soft_bound(const Dataset& data, const Kernel& kernel, double e1) {
    check_positive(e1, "E1");
    const double m = estimate_e1(data, kernel);
    if (m * m > e1 * e1 * (1.0 + kNormSlack))
        fail(ErrorKind::precondition,
             "soft bound E1 violated: mean squared norm " + std::to_string(m * m) + " > E1^2 " +
                 std::to_string(e1 * e1),
             "E1");
}

SensitivityProfile sens_sigmoid(const DataBound& bound, double k, const Dataset& data, const Kernel& kernel) {
    check_positive(k, "k");
    if (bound.mode == DataBound::Mode::hard) check_hard_bound(data, kernel, bound.value);
    else check_soft_bound(data, kernel, bound.value);
    const double e1 = bound.e1();
    return SensitivityProfile::make_constant(60.0 + 32.0 * k * e1 * e1, data.size(), ProfileSource::sigmoid);
}

SensitivityProfile sens_logistic_hard(double a, double k, const Dataset& data, const Kernel& kernel) {
    check_positive(k, "k");
    check_hard_bound(data, kernel, a);
    const double ka2 = k * a * a;
    const double s = 1.0 + 340.0 * (1.0 + ka2) / sqrt_log_floor(ka2);
    return SensitivityProfile::make_constant(s, data.size(), ProfileSource::logistic_hard);
}

SensitivityProfile sens_logistic_soft(double e1, double k, const Dataset& data, const Kernel& kernel) {
    check_positive(k, "k");
    check_soft_bound(data, kernel, e1);
    const double ke2 = k * e1 * e1;
    const double root = sqrt_log_floor(2.0 * ke2);
    const double main = 680.0 * (1.0 + ke2) / root;
    std::vector<double> values;
    values.reserve(data.size());
    for (double y : norms(data, kernel))
        values.push_back(2.0 + (2.0 + y / e1) * main + (2.0 * ke2 + 2.0 * k * e1 * y) / root);
    auto p = SensitivityProfile::make(std::move(values), data.probabilities(), ProfileSource::logistic_soft);
    if (p.total > 2100.0 * (1.0 + ke2) / root)
        fail(ErrorKind::numeric, "logistic total sensitivity exceeds its ceiling", "profile");
    return p;
}

SensitivityProfile sens_logistic_soft_simple(double e1, double k, const Dataset& data, const Kernel& kernel) {
    check_positive(k, "k");
    check_soft_bound(data, kernel, e1);
    const double ke2 = k * e1 * e1;
    const double root = sqrt_log_floor(2.0 * ke2);
    const double main = 680.0 * (1.0 + ke2) / root;
    std::vector<double> values;
    values.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double y2 = rkhs_norm_sq(kernel, data.point(i));
        values.push_back(2.0 + (3.0 + y2 / (e1 * e1)) * main + (2.0 * ke2 + 2.0 * k * (e1 * e1 + y2)) / root);
    }
    return SensitivityProfile::make(std::move(values), data.probabilities(), ProfileSource::logistic_soft_simple);
}

SensitivityProfile sens_svm_hard(double a, double k, const Dataset& data, const Kernel& kernel) {
    check_positive(k, "k");
    check_hard_bound(data, kernel, a);
    return SensitivityProfile::make_constant(6.0 + 4.0 * k * a * a, data.size(), ProfileSource::svm_hard);
}

namespace {

SensitivityProfile svm_soft_from_norms(double e1, double k, const std::vector<double>& y, const Vector& p,
                                       ProfileSource source) {
    const double lead = 6.0 + 8.0 * k * e1 * e1;
    std::vector<double> values;
    values.reserve(y.size());
    for (double v : y) values.push_back(lead * (2.0 + v / e1));
    auto profile = SensitivityProfile::make(std::move(values), p, source);
    if (profile.total > 3.0 * lead * (1.0 + kNormSlack))
        fail(ErrorKind::numeric, "svm total sensitivity exceeds its ceiling", "profile");
    return profile;
}

} // namespace

SensitivityProfile sens_svm_soft(double e1, double k, const Dataset& data, const Kernel& kernel) {
    check_positive(k, "k");
    check_soft_bound(data, kernel, e1);
    return svm_soft_from_norms(e1, k, norms(data, kernel), data.probabilities(), ProfileSource::svm_soft);
}

SensitivityProfile sens_relu(const DataBound& bound, double k, const Dataset& data, ReluNorm norm) {
    check_positive(k, "k");
    const Kernel linear = Kernel::linear();
    if (bound.mode == DataBound::Mode::hard) {
        check_hard_bound(data, linear, bound.value);
        const double a = 1.0 + bound.value;
        return SensitivityProfile::make_constant(6.0 + 4.0 * k * a * a, data.size(), ProfileSource::relu_hard);
    }
    check_soft_bound(data, linear, bound.value);
    std::vector<double> y = norms(data, linear);
    if (norm == ReluNorm::shifted)
        for (double& v : y) v = std::sqrt(1.0 + v * v);
    return svm_soft_from_norms(1.0 + bound.value, k, y, data.probabilities(),
                               norm == ReluNorm::shifted ? ProfileSource::relu_soft : ProfileSource::relu_soft_plain);
}

SensitivityProfile compute_profile(const LossSpec& spec, const DataBound& bound, const Dataset& data,
                                   const ProfileOptions& options) {
    spec.validate();
    const bool hard = bound.mode == DataBound::Mode::hard;
    switch (spec.phi) {
    case Phi::sigmoid:
        return sens_sigmoid(bound, spec.k, data, spec.kernel);
    case Phi::logistic:
        if (hard) return sens_logistic_hard(bound.value, spec.k, data, spec.kernel);
        return options.logistic_simple ? sens_logistic_soft_simple(bound.value, spec.k, data, spec.kernel)
                                       : sens_logistic_soft(bound.value, spec.k, data, spec.kernel);
    case Phi::svm:
        return hard ? sens_svm_hard(bound.value, spec.k, data, spec.kernel)
                    : sens_svm_soft(bound.value, spec.k, data, spec.kernel);
    case Phi::relu:
        return sens_relu(bound, spec.k, data, options.relu_norm);
    }
    fail(ErrorKind::unsupported, "unknown loss", "loss");
}

double phi_zero_bound(Phi phi) {
    switch (phi) {
    case Phi::sigmoid: return 0.5;
    case Phi::logistic: return 1.0; // log 2 rounded up
    case Phi::svm: return 1.0;
    case Phi::relu: break;
    }
    fail(ErrorKind::unsupported, "relu has no theorem constant of its own; use the svm constant", "loss");
}

double well_behaved_E2(Phi phi) {
    switch (phi) {
    case Phi::sigmoid: return 0.4;
    case Phi::logistic: return 0.4;
    case Phi::svm: return 0.5;
    case Phi::relu: break;
    }
    fail(ErrorKind::unsupported, "E2 is not defined for relu", "loss");
}

double theorem_constant_C(Phi phi, double e1, double e2, double k, double lipschitz) {
    check_positive(e1, "E1");
    check_positive(e2, "E2");
    check_positive(k, "k");
    check_positive(lipschitz, "L");
    const double L = lipschitz;
    return (2.0 * L * e1 + phi_zero_bound(phi)) * std::max(4.0 * e1 * k, 1.0 / e2) + 8.0 * L * k * e1 + 1.0;
}

double theorem_constant_for(const LossSpec& spec, const DataBound& bound) {
    if (spec.phi == Phi::relu)
        return theorem_constant_C(Phi::svm, 1.0 + bound.e1(), well_behaved_E2(Phi::svm), spec.k);
    return theorem_constant_C(spec.phi, bound.e1(), well_behaved_E2(spec.phi), spec.k);
}

namespace {

std::uint64_t ceil_count(double v, const char* what) {
    if (!std::isfinite(v) || v >= 0x1.0p63)
        fail(ErrorKind::numeric, std::string(what) + " does not fit in 64 bits", "m");
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(v)));
}

void check_unit(double v, const char* field) {
    if (!(v > 0.0 && v < 1.0)) fail(ErrorKind::domain, std::string(field) + " must lie in (0, 1)", field);
}

} // namespace

std::uint64_t theorem_sample_size(double S, double C, double eps, double delta) {
    check_positive(S, "S");
    check_positive(C, "C");
    check_unit(eps, "eps");
    check_unit(delta, "delta");
    return ceil_count(2.0 * S / (eps * eps) * (8.0 * C * C + S * std::log(2.0 / delta)), "theorem sample size");
}

std::uint64_t vc_sample_size(double S, double eps, double delta, double vc_dim, double c_univ) {
    check_positive(S, "S");
    check_positive(vc_dim, "vc_dim");
    check_positive(c_univ, "c_univ");
    check_unit(eps, "eps");
    check_unit(delta, "delta");
    return ceil_count(c_univ * S / (eps * eps) * (vc_dim * std::log(S) + std::log(1.0 / delta)), "VC sample size");
}

} // namespace coreset
