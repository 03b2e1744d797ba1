#pragma once

#include "coreset/types.hpp"

#include <string>
#include <string_view>

namespace coreset {

//! Link functions. sigmoid(t) = 1/(1+e^t) and logistic(t) = log(1+e^-t) are
//! both decreasing; svm(t) = max(0, 1-t); relu(t) = max(0, t).
enum class Phi { sigmoid, logistic, svm, relu };

enum class KernelKind { linear, gaussian, laplacian, exponential, shifted_linear };

//! Kernel conventions (h = bandwidth):
//!   linear          <x,w>
//!   shifted_linear  1 + <x,w>
//!   gaussian        exp(-|x-w|_2^2 / h^2)
//!   laplacian       exp(-|x-w|_1 / h)
//!   exponential     exp(-|x-w|_2 / h)
struct Kernel {
    KernelKind kind = KernelKind::linear;
    double bandwidth = 1.0;

    static Kernel linear() { return {KernelKind::linear, 1.0}; }
    static Kernel shifted_linear() { return {KernelKind::shifted_linear, 1.0}; }
    static Kernel gaussian(double h) { return {KernelKind::gaussian, h}; }
    static Kernel laplacian(double h) { return {KernelKind::laplacian, h}; }
    static Kernel exponential(double h) { return {KernelKind::exponential, h}; }

    //! True for kernels with K(x,x) = 1 for all x.
    bool is_normalized() const {
        return kind == KernelKind::gaussian || kind == KernelKind::laplacian ||
               kind == KernelKind::exponential;
    }
    void validate() const;
};

enum class Sign { plus, minus };

struct LossSpec {
    Phi phi = Phi::logistic;
    double k = 1.0;
    Kernel kernel;
    Sign sign = Sign::plus;

    //! Throws Error(domain) for k <= 0 or a bad bandwidth, Error(unsupported)
    //! for relu with a non-linear kernel.
    void validate() const;
};

std::string_view to_string(Phi phi);
std::string_view to_string(KernelKind kind);
Phi parse_phi(std::string_view name);
//! Parses "linear", "shifted-linear", "gaussian", "gaussian:bw=0.5", ...
Kernel parse_kernel(std::string_view text);
std::string describe(const Kernel& kernel);

double phi_value(Phi phi, double t);
//! Derivative; for svm and relu the subgradient 0 is used at the kink.
double phi_derivative(Phi phi, double t);

double kernel_value(const Kernel& kernel, Point x, Point w);
//! |x|_H^2 = K(x, x).
double rkhs_norm_sq(const Kernel& kernel, Point x);

//! phi(+-K(w,x)) + K(w,w)/k.
double reg_loss(const LossSpec& spec, Point x, Point w);
//! max(0, <x,w>) + |w|^2/k.
double relu_loss(double k, Point x, Point w);
//! reg_loss, or relu_loss when spec.phi is relu.
double pointwise_loss(const LossSpec& spec, Point x, Point w);

//! Weighted mean sum_i u_i l(x_i, w) / sum_i u_i.
double empirical_mean_loss(const LossSpec& spec, const Matrix& points, const Vector& weights, Point w);

//! K(x_i, w_j) for every row x_i of `points` and w_j of `params`.
Matrix kernel_matrix(const Kernel& kernel, const Matrix& points, const Matrix& params);

//! l(x_i, w_j) for every row x_i of `points` and w_j of `params`.
Matrix loss_matrix(const LossSpec& spec, const Matrix& points, const Matrix& params);

//! For each row w_j of `params`: sum_i u_i l(x_i, w_j) (not normalized).
//! Rows are processed in blocks so memory stays bounded for large inputs.
Vector weighted_loss_sums(const LossSpec& spec, const Matrix& points, const Vector& weights,
                          const Matrix& params);

} // namespace coreset
