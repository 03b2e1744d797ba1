#pragma once

#include "coreset/dataset.hpp"
#include "coreset/losses.hpp"
#include "coreset/sampling.hpp"
#include "coreset/sensitivity.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace coreset {

// ---- optimizer -------------------------------------------------------------

struct OptimizerOptions {
    std::size_t steps = 2000;
    //! Fixed step; when unset a step of 1/(smoothness bound) is used for the
    //! smooth links and 1/sqrt(t)-decay for svm.
    std::optional<double> step_size;
};

//! sum_i u_i phi(+-<x_i,w>) + (sum_i u_i) |w|^2 / k. Linear kernel only.
double reg_objective(const LossSpec& spec, const Matrix& points, const Vector& weights, const Vector& w);
Vector reg_gradient(const LossSpec& spec, const Matrix& points, const Vector& weights, const Vector& w);

//! Gradient descent (subgradient for svm, keeping the best iterate).
//! Throws Error(numeric) naming the step at which an iterate went non-finite.
Vector minimize_reg_loss(const LossSpec& spec, const Matrix& points, const Vector& weights, const Vector& init,
                         const OptimizerOptions& options = {});

// ---- candidates ------------------------------------------------------------

enum class CandidateStrategy {
    dyadic_shells,
    minimizer_augmented,   // shells + minimizers of the coreset and full losses
    discrepancy_augmented, // shells + +-(full mean - coreset mean) direction on every shell
    fixed
};

std::string_view to_string(CandidateStrategy strategy);
CandidateStrategy parse_candidate_strategy(std::string_view name);

struct CandidateOptions {
    CandidateStrategy strategy = CandidateStrategy::dyadic_shells;
    std::size_t directions_per_shell = 32;
    int shell_min = -6;
    int shell_max = 6;
    Matrix fixed;               // rows used by the fixed strategy
    OptimizerOptions optimizer; // for minimizer_augmented
};

struct CandidateSet {
    Matrix vectors; // one candidate per row; never contains the zero vector
    CandidateStrategy strategy = CandidateStrategy::dyadic_shells;
    std::size_t size() const { return static_cast<std::size_t>(vectors.rows()); }
};

//! Shells: for each j in [shell_min, shell_max], directions_per_shell unit
//! directions scaled to 2^j. Directions come in antipodal pairs.
CandidateSet make_candidates(std::size_t d, const CandidateOptions& options, std::uint64_t seed);
//! Data-dependent strategies need the loss, the data and the coreset.
CandidateSet make_candidates(const CandidateOptions& options, const LossSpec& spec, const Dataset& data,
                             const Coreset& coreset, std::uint64_t seed);

// ---- relative error ----------------------------------------------------------

//! |mean_full - sum_i u_i l(x_i,w)| / mean_full. Throws Error(numeric) when
//! the full mean loss is zero.
double relative_error(const Dataset& data, const Coreset& coreset, const LossSpec& spec, Point w);

struct SupError {
    double value = 0.0; // max over candidates; a lower bound on the true sup
    std::size_t argmax = 0;
    double mean = 0.0;
    std::vector<double> errors;
};

SupError sup_relative_error(const Dataset& data, const Coreset& coreset, const LossSpec& spec,
                            const CandidateSet& candidates);

//! Full-data mean losses at every candidate (p-weighted).
Vector full_mean_losses(const Dataset& data, const LossSpec& spec, const Matrix& params);

// ---- downstream transfer -----------------------------------------------------

struct TransferResult {
    double eps_hat = 0.0;         // sup error on the minimizer-augmented candidates
    double full_at_coreset = 0.0; // full mean loss at the coreset minimizer
    double full_at_full = 0.0;    // full mean loss at the full-data minimizer
    double bound = 0.0;           // (1 + eps_hat) / (1 - eps_hat), inf when eps_hat >= 1
    bool holds() const { return full_at_coreset <= bound * full_at_full; }
};

//! Minimizes the coreset and full losses and checks that the coreset
//! minimizer is within the factor implied by the measured error.
TransferResult minimizer_transfer(const Dataset& data, const Coreset& coreset, const LossSpec& spec,
                                  const CandidateOptions& options, std::uint64_t seed);

// ---- Rademacher --------------------------------------------------------------

//! Average over trials of sup_w (1/m) sum_i sigma_i T(x_i; w) with x ~ q and
//! random signs, the sup taken over the candidate set.
double estimate_rademacher(const Dataset& data, const SensitivityProfile& profile, const LossSpec& spec,
                           const CandidateSet& candidates, std::size_t m, std::size_t trials, std::uint64_t seed);

// ---- KDE -----------------------------------------------------------------------

//! Weighted kernel mean. Kernels must map into (0, 1]; linear kernels are rejected.
double kde_value(const Kernel& kernel, const Matrix& points, const Vector& weights, Point w);
Vector kde_values(const Kernel& kernel, const Matrix& points, const Vector& weights, const Matrix& probes);

//! A quarter each of data points, sample points, midpoints of data pairs and
//! uniform points in the ball holding the data.
Matrix make_kde_probes(const Dataset& full, const Coreset& sample, std::size_t count, std::uint64_t seed);

struct KdeOptions {
    std::size_t refine_starts = 10; // best probes refined by local ascent; 0 disables
    std::size_t refine_iterations = 40;
};

struct KdeSupError {
    double value = 0.0;       // after refinement
    double probe_value = 0.0; // max over the probes alone
    Vector argmax;
};

//! max |KDE_full - KDE_sample| over the probes, then improved by gradient
//! ascent from the worst probes. A lower bound on the sup over R^d.
KdeSupError kde_sup_error(const Dataset& full, const Coreset& sample, const Kernel& kernel, const Matrix& probes,
                          const KdeOptions& options = {});

// ---- range structure -----------------------------------------------------------

//! (direct, derived): direct = [l(x,w) > r], derived = closed-form halfspace
//! predicate in <x,w>. Linear kernel, plus sign, sigmoid/logistic/svm.
std::pair<bool, bool> sublevel_halfspace_check(const LossSpec& spec, Point w, double r, Point x);

} // namespace coreset
