#include "coreset/sampling.hpp"

#include "coreset/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace coreset {

IndexSampler::IndexSampler(std::span<const double> masses) {
    if (masses.empty()) fail(ErrorKind::precondition, "cannot sample from an empty set", "weights");
    cumulative_.resize(masses.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        if (!(masses[i] >= 0.0) || !std::isfinite(masses[i]))
            fail(ErrorKind::precondition, "sampling mass must be finite and nonnegative", "weights", i);
        acc += masses[i];
        cumulative_[i] = acc;
    }
    if (!(acc > 0.0)) fail(ErrorKind::numeric, "total sampling mass is zero", "weights");
}

std::size_t IndexSampler::operator()(Philox& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    // u < total always, but rounding in u * total can land on the last edge.
    const auto i = static_cast<std::size_t>(it - cumulative_.begin());
    return std::min(i, cumulative_.size() - 1);
}

double IndexSampler::probability(std::size_t i) const {
    const double lo = i == 0 ? 0.0 : cumulative_[i - 1];
    return (cumulative_[i] - lo) / cumulative_.back();
}

namespace {

Coreset draw(const Dataset& data, std::span<const double> masses, std::size_t m, std::uint64_t seed) {
    if (m == 0) fail(ErrorKind::precondition, "m must be at least 1", "m");
    const IndexSampler sampler(masses);
    Philox rng(seed);
    Coreset c;
    c.seed = seed;
    c.points.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(data.dim()));
    c.weights.resize(static_cast<Eigen::Index>(m));
    c.source_indices.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = sampler(rng);
        c.source_indices[j] = i;
        c.points.row(static_cast<Eigen::Index>(j)) = data.points().row(static_cast<Eigen::Index>(i));
    }
    return c;
}

std::span<const double> span_of(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

} // namespace

Coreset sample_uniform(const Dataset& data, std::size_t m, std::uint64_t seed) {
    Coreset c = draw(data, span_of(data.weights()), m, seed);
    c.weights.setConstant(1.0 / static_cast<double>(m));
    return c;
}

Vector sensitivity_distribution(const Dataset& data, const SensitivityProfile& profile) {
    if (profile.values.size() != data.size())
        fail(ErrorKind::dimension_mismatch, "profile is not aligned with the dataset", "profile");
    const Vector p = data.probabilities();
    if (profile.constant) return p;
    Vector q(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) q[i] = p[i] * profile.values[static_cast<std::size_t>(i)] / profile.total;
    const double sum = q.sum();
    if (std::abs(sum - 1.0) > 1e-12) q /= sum; // S was clamped or rounded; keep q a distribution
    return q;
}

Coreset sample_sensitivity(const Dataset& data, const SensitivityProfile& profile, std::size_t m,
                           std::uint64_t seed) {
    if (profile.values.size() != data.size())
        fail(ErrorKind::dimension_mismatch, "profile is not aligned with the dataset", "profile");
    if (profile.constant) return sample_uniform(data, m, seed);
    const Vector q = sensitivity_distribution(data, profile);
    Coreset c = draw(data, span_of(q), m, seed);
    const double md = static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j)
        c.weights[static_cast<Eigen::Index>(j)] = profile.total / (md * profile.values[c.source_indices[j]]);
    return c;
}

Coreset whole_dataset(const Dataset& data) {
    Coreset c;
    c.points = data.points();
    c.weights = data.probabilities();
    c.source_indices.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) c.source_indices[i] = i;
    return c;
}

void write_coreset_csv(std::ostream& out, const Coreset& c) {
    char buf[32];
    for (std::size_t j = 0; j < c.dim(); ++j) out << 'x' << (j + 1) << ',';
    out << "weight,index\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = 0; j < c.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", c.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", c.weights[static_cast<Eigen::Index>(i)]);
        out << buf << ',' << c.source_indices[i] << '\n';
    }
}

Coreset read_coreset_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) fail(ErrorKind::io, "empty coreset file", "coreset");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (!header.ends_with("weight,index")) fail(ErrorKind::io, "missing coreset header", "coreset");
    // Reuse the dataset reader: the index column is an integer-valued number.
    const Dataset table = read_dataset_csv(in, CsvOptions{false, false});
    if (table.dim() < 3) fail(ErrorKind::io, "coreset rows need at least one coordinate", "coreset");
    const auto d = static_cast<Eigen::Index>(table.dim() - 2);
    Coreset c;
    c.points = table.points().leftCols(d);
    c.weights = table.points().col(d);
    c.source_indices.resize(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        const double idx = table.points()(static_cast<Eigen::Index>(i), d + 1);
        if (idx < 0 || idx != std::floor(idx)) fail(ErrorKind::io, "bad index column", "coreset", i);
        c.source_indices[i] = static_cast<std::size_t>(idx);
        if (!(c.weights[static_cast<Eigen::Index>(i)] > 0.0)) fail(ErrorKind::io, "bad weight", "coreset", i);
    }
    return c;
}

AugmentedFamily::AugmentedFamily(const Dataset& data, const SensitivityProfile& profile, const LossSpec& spec,
                                 Point w)
    : data_(data), profile_(profile), spec_(spec), w_(w.begin(), w.end()) {
    if (profile.values.size() != data.size())
        fail(ErrorKind::dimension_mismatch, "profile is not aligned with the dataset", "profile");
    mean_ = empirical_mean_loss(spec, data.points(), data.weights(), w);
    if (!(mean_ > 0.0)) {
        if (mean_ == 0.0) mean_ = kMeanLossFloor;
        else fail(ErrorKind::numeric, "mean loss is negative or NaN", "w");
    }
}

double AugmentedFamily::operator()(std::size_t index) const {
    if (index >= data_.size()) fail(ErrorKind::precondition, "index out of range", "index", index);
    const double f = pointwise_loss(spec_, data_.point(index), {w_.data(), w_.size()});
    return profile_.total * f / (profile_.values[index] * mean_);
}

double augmented_T(const Dataset& data, const SensitivityProfile& profile, const LossSpec& spec, Point w,
                   std::size_t index) {
    return AugmentedFamily(data, profile, spec, w)(index);
}

} // namespace coreset
