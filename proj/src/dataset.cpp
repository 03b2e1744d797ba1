#include "coreset/dataset.hpp"

#include "coreset/error.hpp"
#include "coreset/rng.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace coreset {

namespace {

std::optional<double> to_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || p != end) return std::nullopt;
    return v;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

SyntheticSource SyntheticSource::parse(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    SyntheticSource s;
    if (name == "gaussian") s.kind = Kind::gaussian_iso;
    else if (name == "ball") s.kind = Kind::uniform_ball;
    else if (name == "gaussian-ball") s.kind = Kind::gaussian_scaled_to_ball;
    else fail(ErrorKind::config, "unknown synthetic source '" + std::string(name) + "'", "source");

    bool have_d = false;
    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            fail(ErrorKind::config, "expected key=value in '" + std::string(item) + "'", "source");
        const std::string_view key = item.substr(0, eq);
        const auto value = to_double(item.substr(eq + 1));
        if (!value) fail(ErrorKind::config, "bad number in '" + std::string(item) + "'", "source");
        if (key == "d") {
            if (*value < 1 || *value != std::floor(*value))
                fail(ErrorKind::config, "d must be a positive integer", "source");
            s.dim = static_cast<std::size_t>(*value);
            have_d = true;
        } else if ((key == "scale" && s.kind == Kind::gaussian_iso) || (key == "r" && s.kind == Kind::uniform_ball)) {
            if (!(*value > 0.0) || !std::isfinite(*value))
                fail(ErrorKind::config, std::string(key) + " must be positive", "source");
            s.param = *value;
        } else {
            fail(ErrorKind::config, "unknown key '" + std::string(key) + "' for source " + std::string(name), "source");
        }
    }
    if (!have_d) fail(ErrorKind::config, "synthetic source needs d=<dim>", "source");
    return s;
}

std::string SyntheticSource::describe() const {
    switch (kind) {
    case Kind::gaussian_iso: return "gaussian:d=" + std::to_string(dim) + ",scale=" + fmt(param);
    case Kind::uniform_ball: return "ball:d=" + std::to_string(dim) + ",r=" + fmt(param);
    case Kind::gaussian_scaled_to_ball: return "gaussian-ball:d=" + std::to_string(dim);
    }
    return "?";
}

double SyntheticSource::analytic_e1() const {
    const double d = static_cast<double>(dim);
    switch (kind) {
    case Kind::gaussian_iso: return param * std::sqrt(d);
    case Kind::uniform_ball: return param * std::sqrt(d / (d + 2.0));
    case Kind::gaussian_scaled_to_ball: return 1.0; // clipping only lowers E|x|^2 = 1
    }
    return 0.0;
}

std::optional<double> SyntheticSource::hard_bound() const {
    switch (kind) {
    case Kind::gaussian_iso: return std::nullopt;
    case Kind::uniform_ball: return param;
    case Kind::gaussian_scaled_to_ball: return 1.0;
    }
    return std::nullopt;
}

Dataset::Dataset(Matrix points, Vector weights, std::optional<SyntheticSource> source)
    : points_(std::move(points)), weights_(std::move(weights)), source_(source) {
    if (points_.rows() == 0) fail(ErrorKind::precondition, "dataset is empty", "points");
    if (points_.cols() == 0) fail(ErrorKind::precondition, "dataset has dimension 0", "points");
    if (weights_.size() != points_.rows())
        fail(ErrorKind::dimension_mismatch, "weights and points differ in length", "weights");
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
        if (!points_.row(i).allFinite())
            fail(ErrorKind::precondition, "non-finite coordinate in row " + std::to_string(i), "points",
                 static_cast<std::size_t>(i));
        if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
            fail(ErrorKind::precondition, "weight must be positive and finite in row " + std::to_string(i),
                 "weights", static_cast<std::size_t>(i));
    }
    if (source_ && source_->dim != dim())
        fail(ErrorKind::dimension_mismatch, "source metadata dimension differs from the data", "source");
}

Dataset Dataset::uniform(Matrix points, std::optional<SyntheticSource> source) {
    Vector w = Vector::Ones(points.rows());
    return Dataset(std::move(points), std::move(w), source);
}

Dataset generate(const SyntheticSource& source, std::size_t n, std::uint64_t seed) {
    if (n == 0) fail(ErrorKind::precondition, "n must be positive", "n");
    if (source.dim == 0) fail(ErrorKind::precondition, "dimension must be positive", "source");
    const auto d = static_cast<Eigen::Index>(source.dim);
    Matrix x(static_cast<Eigen::Index>(n), d);
    Philox rng(seed);
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        auto r = x.row(i);
        for (Eigen::Index j = 0; j < d; ++j) r[j] = rng.normal();
        switch (source.kind) {
        case SyntheticSource::Kind::gaussian_iso:
            r *= source.param;
            break;
        case SyntheticSource::Kind::uniform_ball: {
            double norm = r.norm();
            while (norm == 0.0) { // measure zero, but keep the direction well defined
                for (Eigen::Index j = 0; j < d; ++j) r[j] = rng.normal();
                norm = r.norm();
            }
            const double radius = source.param * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
            r *= radius / norm;
            // Rounding can push the computed norm a hair past r.
            while (r.norm() > source.param) r *= 1.0 - 0x1.0p-52;
            break;
        }
        case SyntheticSource::Kind::gaussian_scaled_to_ball: {
            r *= inv_sqrt_d;
            const double norm = r.norm();
            if (norm > 1.0) {
                r /= norm;
                while (r.norm() > 1.0) r *= 1.0 - 0x1.0p-52;
            }
            break;
        }
        }
    }
    return Dataset::uniform(std::move(x), source);
}

Dataset read_dataset_csv(std::istream& in, const CsvOptions& options) {
    std::vector<double> values;
    std::size_t cols = 0, rows = 0, line_no = 0;
    std::string line;
    bool skipped_header = !options.header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        std::size_t count = 0;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            const auto v = to_double(rest.substr(0, comma));
            if (!v)
                fail(ErrorKind::io, "line " + std::to_string(line_no) + ": bad number '" +
                                        std::string(rest.substr(0, comma)) + "'",
                     "csv", line_no);
            if (!std::isfinite(*v))
                fail(ErrorKind::io, "line " + std::to_string(line_no) + ": non-finite value", "csv", line_no);
            values.push_back(*v);
            ++count;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (rows == 0) cols = count;
        else if (count != cols)
            fail(ErrorKind::io,
                 "line " + std::to_string(line_no) + ": expected " + std::to_string(cols) + " fields, got " +
                     std::to_string(count),
                 "csv", line_no);
        ++rows;
    }
    if (in.bad()) fail(ErrorKind::io, "read error", "csv");
    if (rows == 0) fail(ErrorKind::io, "no data rows", "csv");
    if (options.weight_column && cols < 2) fail(ErrorKind::io, "weight column needs at least 2 columns", "csv");

    const std::size_t d = options.weight_column ? cols - 1 : cols;
    Matrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
    Vector w = Vector::Ones(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < d; ++j) x(i, j) = values[i * cols + j];
        if (options.weight_column) w[i] = values[i * cols + d];
    }
    return Dataset(std::move(x), std::move(w));
}

Dataset read_dataset_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'", "source");
    return read_dataset_csv(in, options);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dim(); ++j) out << fmt(data.points()(i, j)) << ',';
        out << fmt(data.weights()[i]) << '\n';
    }
}

} // namespace coreset
