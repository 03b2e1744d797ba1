#pragma once

#include "coreset/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace coreset {

//! Generators with known norm bounds.
//!   gaussian_iso            N(0, scale^2 I); E1 = scale * sqrt(d), no hard bound
//!   uniform_ball            uniform in the radius-r ball; |x| <= r exactly
//!   gaussian_scaled_to_ball N(0, I)/sqrt(d), radially clipped to the unit ball
struct SyntheticSource {
    enum class Kind { gaussian_iso, uniform_ball, gaussian_scaled_to_ball };

    Kind kind = Kind::gaussian_iso;
    std::size_t dim = 1;
    double param = 1.0; // scale or radius; unused for gaussian_scaled_to_ball

    static SyntheticSource gaussian_iso(std::size_t d, double scale) { return {Kind::gaussian_iso, d, scale}; }
    static SyntheticSource uniform_ball(std::size_t d, double r) { return {Kind::uniform_ball, d, r}; }
    static SyntheticSource gaussian_scaled_to_ball(std::size_t d) { return {Kind::gaussian_scaled_to_ball, d, 1.0}; }

    //! Parses "gaussian:d=10,scale=1", "ball:d=10,r=1" or "gaussian-ball:d=10".
    static SyntheticSource parse(std::string_view text);
    std::string describe() const;

    //! Upper bound on sqrt(E|x|^2) under the generating distribution.
    double analytic_e1() const;
    //! Almost-sure bound on |x| when one exists.
    std::optional<double> hard_bound() const;
};

class Dataset {
public:
    //! Throws Error(precondition) on empty input, non-finite entries or
    //! non-positive weights; the offending row is reported in Error::index().
    Dataset(Matrix points, Vector weights, std::optional<SyntheticSource> source = std::nullopt);
    static Dataset uniform(Matrix points, std::optional<SyntheticSource> source = std::nullopt);

    std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
    const Matrix& points() const { return points_; }
    const Vector& weights() const { return weights_; }
    Point point(std::size_t i) const { return row(points_, static_cast<Eigen::Index>(i)); }
    //! Weights normalized to sum to one.
    Vector probabilities() const { return weights_ / weights_.sum(); }
    const std::optional<SyntheticSource>& source() const { return source_; }

private:
    Matrix points_;
    Vector weights_;
    std::optional<SyntheticSource> source_;
};

Dataset generate(const SyntheticSource& source, std::size_t n, std::uint64_t seed);

struct CsvOptions {
    bool header = false;
    bool weight_column = false; // last column holds the weight
};

Dataset read_dataset_csv(std::istream& in, const CsvOptions& options = {});
Dataset read_dataset_csv(const std::filesystem::path& path, const CsvOptions& options = {});
//! Writes one row per point with the weight as the last column.
void write_dataset_csv(std::ostream& out, const Dataset& data);

} // namespace coreset
