#include "coreset/eval.hpp"

#include "coreset/error.hpp"
#include "coreset/rng.hpp"

#include <cmath>
#include <vector>

namespace coreset {

std::string_view to_string(CandidateStrategy strategy) {
    switch (strategy) {
    case CandidateStrategy::dyadic_shells: return "dyadic";
    case CandidateStrategy::minimizer_augmented: return "minimizer";
    case CandidateStrategy::discrepancy_augmented: return "discrepancy";
    case CandidateStrategy::fixed: return "fixed";
    }
    return "?";
}

CandidateStrategy parse_candidate_strategy(std::string_view name) {
    for (auto s : {CandidateStrategy::dyadic_shells, CandidateStrategy::minimizer_augmented,
                   CandidateStrategy::discrepancy_augmented, CandidateStrategy::fixed})
        if (name == to_string(s)) return s;
    fail(ErrorKind::config, "unknown candidate strategy '" + std::string(name) + "'", "candidates");
}

namespace {

Matrix drop_zero_rows(const Matrix& m) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (m.row(i).squaredNorm() > 0.0) keep.push_back(i);
    Matrix out(static_cast<Eigen::Index>(keep.size()), m.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(keep[i]);
    return out;
}

Matrix shells(std::size_t d, const CandidateOptions& o, std::uint64_t seed) {
    if (d == 0) fail(ErrorKind::precondition, "dimension must be positive", "d");
    if (o.shell_max < o.shell_min) fail(ErrorKind::config, "empty shell range", "candidates");
    const std::size_t per = o.directions_per_shell;
    const auto count = static_cast<Eigen::Index>(per * static_cast<std::size_t>(o.shell_max - o.shell_min + 1));
    Matrix out(count, static_cast<Eigen::Index>(d));
    Philox rng(seed);
    Eigen::Index r = 0;
    Vector u(static_cast<Eigen::Index>(d));
    for (int j = o.shell_min; j <= o.shell_max; ++j) {
        const double radius = std::ldexp(1.0, j);
        for (std::size_t i = 0; i < per; ++i) {
            if (i % 2 == 0) {
                double n = 0.0;
                while (n == 0.0) {
                    for (auto& v : u) v = rng.normal();
                    n = u.norm();
                }
                u /= n;
                out.row(r++) = radius * u.transpose();
            } else {
                out.row(r++) = -radius * u.transpose();
            }
        }
    }
    return out;
}

void append(Matrix& m, const Matrix& extra) {
    const Eigen::Index old = m.rows();
    m.conservativeResize(old + extra.rows(), Eigen::NoChange);
    m.bottomRows(extra.rows()) = extra;
}

} // namespace

CandidateSet make_candidates(std::size_t d, const CandidateOptions& options, std::uint64_t seed) {
    CandidateSet c;
    c.strategy = options.strategy;
    switch (options.strategy) {
    case CandidateStrategy::dyadic_shells:
        c.vectors = shells(d, options, seed);
        break;
    case CandidateStrategy::fixed:
        if (static_cast<std::size_t>(options.fixed.cols()) != d)
            fail(ErrorKind::dimension_mismatch, "fixed candidates have the wrong dimension", "candidates");
        c.vectors = drop_zero_rows(options.fixed);
        if (c.vectors.rows() == 0) fail(ErrorKind::precondition, "no nonzero candidates", "candidates");
        break;
    default:
        fail(ErrorKind::precondition, "this strategy needs the loss, data and coreset", "candidates");
    }
    return c;
}

CandidateSet make_candidates(const CandidateOptions& options, const LossSpec& spec, const Dataset& data,
                             const Coreset& coreset, std::uint64_t seed) {
    if (options.strategy == CandidateStrategy::dyadic_shells || options.strategy == CandidateStrategy::fixed)
        return make_candidates(data.dim(), options, seed);
    if (coreset.dim() != data.dim())
        fail(ErrorKind::dimension_mismatch, "coreset and data differ in dimension", "coreset");

    CandidateSet c;
    c.strategy = options.strategy;
    c.vectors = shells(data.dim(), options, seed);
    const auto d = static_cast<Eigen::Index>(data.dim());

    if (options.strategy == CandidateStrategy::minimizer_augmented) {
        const Vector zero = Vector::Zero(d);
        Matrix extra(2, d);
        extra.row(0) = minimize_reg_loss(spec, coreset.points, coreset.weights, zero, options.optimizer).transpose();
        extra.row(1) = minimize_reg_loss(spec, data.points(), data.probabilities(), zero, options.optimizer).transpose();
        append(c.vectors, drop_zero_rows(extra));
        return c;
    }

    // The first-order term of the coreset error at small w is proportional to
    // <mean_full - mean_coreset, w>; random directions in high dimension are
    // nearly orthogonal to it.
    const Vector full_mean = data.points().transpose() * data.probabilities();
    const Vector core_mean = coreset.points.transpose() * coreset.weights;
    Vector g = full_mean - core_mean;
    const double n = g.norm();
    if (n == 0.0 || !std::isfinite(n)) return c;
    g /= n;
    const int shells_count = options.shell_max - options.shell_min + 1;
    Matrix extra(2 * shells_count, d);
    for (int j = 0; j < shells_count; ++j) {
        const double radius = std::ldexp(1.0, options.shell_min + j);
        extra.row(2 * j) = radius * g.transpose();
        extra.row(2 * j + 1) = -radius * g.transpose();
    }
    append(c.vectors, extra);
    return c;
}

} // namespace coreset
