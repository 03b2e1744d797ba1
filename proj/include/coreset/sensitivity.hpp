#pragma once

#include "coreset/dataset.hpp"
#include "coreset/losses.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace coreset {

//! Either an almost-sure bound A on |x|_H or a root-mean-square bound E1
//! (E1^2 >= E|x|_H^2).
struct DataBound {
    enum class Mode { hard, soft };
    Mode mode = Mode::soft;
    double value = 1.0;

    static DataBound hard(double a) { return {Mode::hard, a}; }
    static DataBound soft(double e1) { return {Mode::soft, e1}; }
    //! RMS-norm bound implied by this bound (A itself for a hard bound).
    double e1() const { return value; }
};

enum class ProfileSource {
    sigmoid,
    logistic_hard,
    logistic_soft,
    logistic_soft_simple,
    svm_hard,
    svm_soft,
    relu_hard,
    relu_soft,       // shifted-kernel norm sqrt(1 + |y|^2)
    relu_soft_plain, // plain norm |y|
    uniform          // s == 1, plain uniform sampling with no guarantee attached
};

std::string_view to_string(ProfileSource source);

struct SensitivityProfile {
    std::vector<double> values; // s(x_i), aligned with dataset rows
    double total = 1.0;         // S = sum_i p_i s(x_i)
    bool constant = true;
    ProfileSource source = ProfileSource::uniform;

    //! Constant profile s == value over n points.
    static SensitivityProfile make_constant(double value, std::size_t n, ProfileSource source);
    //! Computes S as the p-weighted mean. Throws Error(numeric) if any value
    //! is below 1 or non-finite.
    static SensitivityProfile make(std::vector<double> values, const Vector& probabilities, ProfileSource source);

    double max_value() const;
    double min_value() const;
};

// Closed-form upper bounds on (phi(-a z) + z^2/k) / (phi(a z) + z^2/k) over z >= 0.
double beta_sigmoid(double alpha, double k);
double beta_logistic(double alpha, double k); // upper arm taken at alpha^2 k == e
double beta_svm(double alpha, double k);
double beta_bound(Phi phi, double alpha, double k);
double beta_ratio(Phi phi, double alpha, double z, double k);

struct BetaGrid {
    double step = 0.05;
    double max = 100.0;
    std::vector<double> ks{0.1, 1.0, 10.0, 100.0};
};

struct BetaGridResult {
    Phi phi = Phi::sigmoid;
    std::uint64_t checked = 0;
    std::uint64_t failures = 0;
    double worst_ratio_over_beta = 0.0; // max of ratio / beta over the grid
    double worst_alpha = 0.0, worst_z = 0.0, worst_k = 0.0;
    bool passed() const { return failures == 0; }
};

//! Evaluates ratio <= beta on alpha, z in {0, step, ..., max} for every k.
//! Grid points are i * step so they are reproducible.
BetaGridResult verify_beta_grid(Phi phi, const BetaGrid& grid = {});

//! sqrt of the p-weighted mean of |x|_H^2; the tightest valid E1.
double estimate_e1(const Dataset& data, const Kernel& kernel = Kernel::linear());
//! max_i |x_i|_H; the tightest valid A.
double estimate_hard_bound(const Dataset& data, const Kernel& kernel = Kernel::linear());

//! Throws Error(precondition) naming the first row with |x|_H > A.
void check_hard_bound(const Dataset& data, const Kernel& kernel, double a);
//! Throws Error(precondition) if the weighted mean of |x|_H^2 exceeds E1^2.
void check_soft_bound(const Dataset& data, const Kernel& kernel, double e1);

// Per-lemma profiles. Bounds are validated against the data; the kernel
// decides |x|_H (linear when omitted).
SensitivityProfile sens_sigmoid(const DataBound& bound, double k, const Dataset& data,
                                const Kernel& kernel = Kernel::linear());
SensitivityProfile sens_logistic_hard(double a, double k, const Dataset& data,
                                      const Kernel& kernel = Kernel::linear());
SensitivityProfile sens_logistic_soft(double e1, double k, const Dataset& data,
                                      const Kernel& kernel = Kernel::linear());
SensitivityProfile sens_logistic_soft_simple(double e1, double k, const Dataset& data,
                                             const Kernel& kernel = Kernel::linear());
SensitivityProfile sens_svm_hard(double a, double k, const Dataset& data,
                                 const Kernel& kernel = Kernel::linear());
SensitivityProfile sens_svm_soft(double e1, double k, const Dataset& data,
                                 const Kernel& kernel = Kernel::linear());

enum class ReluNorm { shifted, plain };

//! Svm bound for the shifted kernel 1 + <x,w> with A -> 1+A or E1 -> 1+E1.
//! The soft variant measures |y| in the shifted space, sqrt(1+|y|^2), unless
//! `norm` is plain.
SensitivityProfile sens_relu(const DataBound& bound, double k, const Dataset& data,
                             ReluNorm norm = ReluNorm::shifted);

struct ProfileOptions {
    bool logistic_simple = false;
    ReluNorm relu_norm = ReluNorm::shifted;
};

//! Picks the lemma matching (spec.phi, bound.mode).
SensitivityProfile compute_profile(const LossSpec& spec, const DataBound& bound, const Dataset& data,
                                   const ProfileOptions& options = {});

//! Bound on phi(0) used in C: 1/2 for sigmoid, 1 for logistic and svm.
double phi_zero_bound(Phi phi);
//! Lower bound on phi(1/2)-type expectations: 0.4 sigmoid/logistic, 0.5 svm.
double well_behaved_E2(Phi phi);
//! (2 L E1 + phi0) max(4 E1 k, 1/E2) + 8 L k E1 + 1.
double theorem_constant_C(Phi phi, double e1, double e2, double k, double lipschitz = 1.0);
//! C for a loss spec and bound; relu uses the svm constant with E1 -> 1+E1.
double theorem_constant_for(const LossSpec& spec, const DataBound& bound);

//! ceil(2S/eps^2 (8C^2 + S log(2/delta))).
std::uint64_t theorem_sample_size(double S, double C, double eps, double delta);
//! ceil(c S/eps^2 (d log S + log(1/delta))).
std::uint64_t vc_sample_size(double S, double eps, double delta, double vc_dim, double c_univ = 1.0);

} // namespace coreset
