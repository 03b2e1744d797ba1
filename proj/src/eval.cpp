#include "coreset/eval.hpp"

#include "coreset/error.hpp"
#include "coreset/rng.hpp"

#include <cmath>
#include <limits>

namespace coreset {

Vector full_mean_losses(const Dataset& data, const LossSpec& spec, const Matrix& params) {
    // p sums to one, so the weighted sum is the mean. Using the same
    // weights as whole_dataset() makes dataset-as-coreset errors exactly 0.
    return weighted_loss_sums(spec, data.points(), data.probabilities(), params);
}

SupError sup_relative_error(const Dataset& data, const Coreset& coreset, const LossSpec& spec,
                            const CandidateSet& candidates) {
    spec.validate();
    if (candidates.size() == 0) fail(ErrorKind::precondition, "empty candidate set", "candidates");
    if (coreset.dim() != data.dim())
        fail(ErrorKind::dimension_mismatch, "coreset and data differ in dimension", "coreset");
    const Vector full = full_mean_losses(data, spec, candidates.vectors);
    const Vector approx = weighted_loss_sums(spec, coreset.points, coreset.weights, candidates.vectors);
    SupError out;
    out.errors.resize(candidates.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (!(full[jj] > 0.0))
            fail(ErrorKind::numeric, "full mean loss is zero at candidate " + std::to_string(j), "candidates", j);
        const double e = std::abs(full[jj] - approx[jj]) / full[jj];
        if (!std::isfinite(e)) fail(ErrorKind::numeric, "non-finite relative error", "candidates", j);
        out.errors[j] = e;
        sum += e;
        if (j == 0 || e > out.value) {
            out.value = e;
            out.argmax = j;
        }
    }
    out.mean = sum / static_cast<double>(candidates.size());
    return out;
}

double relative_error(const Dataset& data, const Coreset& coreset, const LossSpec& spec, Point w) {
    if (w.size() != data.dim()) fail(ErrorKind::dimension_mismatch, "w has the wrong dimension", "w");
    CandidateSet one;
    one.strategy = CandidateStrategy::fixed;
    one.vectors = as_eigen(w).transpose();
    return sup_relative_error(data, coreset, spec, one).value;
}

double estimate_rademacher(const Dataset& data, const SensitivityProfile& profile, const LossSpec& spec,
                           const CandidateSet& candidates, std::size_t m, std::size_t trials, std::uint64_t seed) {
    spec.validate();
    if (m == 0) fail(ErrorKind::precondition, "m must be at least 1", "m");
    if (trials == 0) fail(ErrorKind::precondition, "trials must be at least 1", "trials");
    if (candidates.size() == 0) fail(ErrorKind::precondition, "empty candidate set", "candidates");
    Vector mean = full_mean_losses(data, spec, candidates.vectors);
    for (auto& v : mean) v = std::max(v, kMeanLossFloor);
    const double md = static_cast<double>(m);

    double acc = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = derive_seed(seed, t);
        const Coreset draw = sample_sensitivity(data, profile, m, trial_seed);
        Matrix T = loss_matrix(spec, draw.points, candidates.vectors);
        Philox signs(trial_seed, 1);
        Vector sigma(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) {
            const double s = profile.values[draw.source_indices[i]];
            sigma[static_cast<Eigen::Index>(i)] = ((signs.next_u64() >> 63) ? 1.0 : -1.0) * profile.total / (s * md);
        }
        // (1/m) sum_i sigma_i S f_j(x_i) / (s_i mean_j)
        const Vector v = (T.transpose() * sigma).cwiseQuotient(mean);
        acc += v.maxCoeff();
    }
    return acc / static_cast<double>(trials);
}

TransferResult minimizer_transfer(const Dataset& data, const Coreset& coreset, const LossSpec& spec,
                                  const CandidateOptions& options, std::uint64_t seed) {
    CandidateOptions o = options;
    o.strategy = CandidateStrategy::minimizer_augmented;
    const CandidateSet cand = make_candidates(o, spec, data, coreset, seed);
    const auto shells = static_cast<std::size_t>(o.shell_max - o.shell_min + 1) * o.directions_per_shell;
    if (cand.size() != shells + 2) fail(ErrorKind::numeric, "a minimizer was exactly zero", "candidates");
    TransferResult r;
    r.eps_hat = sup_relative_error(data, coreset, spec, cand).value;
    // The last two rows are the coreset and full minimizers, in that order.
    const Vector full = full_mean_losses(data, spec, cand.vectors.bottomRows(2));
    r.full_at_coreset = full[0];
    r.full_at_full = full[1];
    r.bound = r.eps_hat < 1.0 ? (1.0 + r.eps_hat) / (1.0 - r.eps_hat) : std::numeric_limits<double>::infinity();
    return r;
}

std::pair<bool, bool> sublevel_halfspace_check(const LossSpec& spec, Point w, double r, Point x) {
    spec.validate();
    if (spec.kernel.kind != KernelKind::linear || spec.sign != Sign::plus || spec.phi == Phi::relu)
        fail(ErrorKind::unsupported, "halfspace check needs a linear kernel, plus sign and a bounded-below link",
             "loss");
    const bool direct = reg_loss(spec, x, w) > r;
    const double wn = rkhs_norm_sq(spec.kernel, w);
    const double s = kernel_value(spec.kernel, x, w);
    const double t = r - wn / spec.k;
    bool derived = false;
    switch (spec.phi) {
    case Phi::sigmoid:
        derived = t <= 0.0 ? true : t >= 1.0 ? false : s < std::log(1.0 / t - 1.0);
        break;
    case Phi::logistic:
        // lgst is decreasing: lgst(s) > t  <=>  s < -log(e^t - 1).
        derived = t <= 0.0 ? true : s < -std::log(std::expm1(t));
        break;
    case Phi::svm:
        derived = t < 0.0 ? true : s < 1.0 - t;
        break;
    case Phi::relu:
        break;
    }
    return {direct, derived};
}

} // namespace coreset
