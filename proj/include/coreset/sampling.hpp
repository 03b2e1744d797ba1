#pragma once

#include "coreset/dataset.hpp"
#include "coreset/losses.hpp"
#include "coreset/rng.hpp"
#include "coreset/sensitivity.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace coreset {

struct Coreset {
    Matrix points;
    Vector weights;
    std::vector<std::size_t> source_indices;
    std::uint64_t seed = 0;

    std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(points.cols()); }
};

//! Draws indices i with probability proportional to the given masses by
//! inverse CDF: one uniform per draw, binary search over the cumulative sums.
class IndexSampler {
public:
    explicit IndexSampler(std::span<const double> masses);
    std::size_t operator()(Philox& rng) const;
    //! Normalized probability of index i.
    double probability(std::size_t i) const;
    std::size_t size() const { return cumulative_.size(); }

private:
    std::vector<double> cumulative_;
};

//! m iid draws from data.weights, each with weight 1/m.
Coreset sample_uniform(const Dataset& data, std::size_t m, std::uint64_t seed);

//! m iid draws from q_i = p_i s_i / S with weights S / (m s_i). A constant
//! profile takes the uniform path, so the index sequence matches
//! sample_uniform under the same seed.
Coreset sample_sensitivity(const Dataset& data, const SensitivityProfile& profile, std::size_t m,
                           std::uint64_t seed);

//! The sampling distribution q for a profile; sums to one.
Vector sensitivity_distribution(const Dataset& data, const SensitivityProfile& profile);

//! The dataset itself as a coreset carrying normalized weights.
Coreset whole_dataset(const Dataset& data);

//! Header "x1,...,xd,weight,index" followed by %.17g rows.
void write_coreset_csv(std::ostream& out, const Coreset& coreset);
Coreset read_coreset_csv(std::istream& in);

//! T(x) = S f(x) / (s(x) mean_P f) for f = l(., w).
class AugmentedFamily {
public:
    AugmentedFamily(const Dataset& data, const SensitivityProfile& profile, const LossSpec& spec, Point w);
    double operator()(std::size_t index) const;
    double mean_loss() const { return mean_; }

private:
    const Dataset& data_;
    const SensitivityProfile& profile_;
    const LossSpec& spec_;
    std::vector<double> w_;
    double mean_;
};

//! Floor on the mean loss in T's denominator.
inline constexpr double kMeanLossFloor = 1e-300;

double augmented_T(const Dataset& data, const SensitivityProfile& profile, const LossSpec& spec, Point w,
                   std::size_t index);

} // namespace coreset
