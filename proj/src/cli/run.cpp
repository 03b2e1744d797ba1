#include "coreset/cli.hpp"

#include "coreset/error.hpp"
#include "coreset/rng.hpp"
#include "coreset/version.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace coreset::cli {

using nlohmann::json;

namespace {

// Stream ids for derive_seed; trial t of a task uses derive_seed(seed, t).
constexpr std::uint64_t kDataStream = 1ull << 40;
constexpr std::uint64_t kCandidateStream = 2ull << 40;
constexpr std::uint64_t kProbeStream = 3ull << 40;
constexpr std::uint64_t kRademacherStream = 4ull << 40;
constexpr std::uint64_t kLevelStream = 5ull << 40;

bool is_synthetic(const std::string& s) {
    return s.starts_with("gaussian:") || s.starts_with("ball:") || s.starts_with("gaussian-ball:");
}

Dataset load(const ExperimentConfig& c, std::optional<std::size_t> dim = std::nullopt) {
    if (is_synthetic(c.source)) {
        SyntheticSource src = SyntheticSource::parse(c.source);
        if (dim) src.dim = *dim;
        return generate(src, c.n, derive_seed(*c.seed, kDataStream + src.dim));
    }
    if (dim) fail(ErrorKind::config, "--dims needs a synthetic source", "dims");
    return read_dataset_csv(std::filesystem::path(c.source), CsvOptions{c.csv_header, c.weight_column});
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

struct ResolvedBound {
    DataBound bound;
    std::string origin;
};

ResolvedBound resolve_bound(const std::string& text, const Dataset& data, const Kernel& kernel) {
    const auto colon = text.find(':');
    const std::string mode = text.substr(0, colon);
    std::optional<double> value;
    if (colon != std::string::npos) {
        std::string arg = text.substr(colon + 1);
        const std::string key = mode == "hard" ? "A=" : "E1=";
        if (arg.starts_with(key)) arg = arg.substr(key.size());
        try {
            std::size_t used = 0;
            value = std::stod(arg, &used);
            if (used != arg.size()) throw std::invalid_argument(arg);
        } catch (const std::exception&) {
            fail(ErrorKind::config, "--bound: bad value '" + arg + "'", "bound");
        }
        if (!(*value > 0.0)) fail(ErrorKind::config, "--bound: value must be positive", "bound");
    }
    if (mode == "auto") {
        if (value) fail(ErrorKind::config, "--bound: auto takes no value", "bound");
        const auto& src = data.source();
        if (src && src->hard_bound() && kernel.kind == KernelKind::linear)
            return {DataBound::hard(*src->hard_bound()), "analytic"};
        return {DataBound::soft(estimate_e1(data, kernel)), "estimated"};
    }
    if (mode == "hard") {
        if (value) return {DataBound::hard(*value), "given"};
        return {DataBound::hard(estimate_hard_bound(data, kernel)), "estimated"};
    }
    if (mode == "soft") {
        if (value) return {DataBound::soft(*value), "given"};
        return {DataBound::soft(estimate_e1(data, kernel)), "estimated"};
    }
    fail(ErrorKind::config, "--bound: expected auto, hard[:A=v] or soft[:E1=v]", "bound");
}

LossSpec loss_of(const ExperimentConfig& c) {
    LossSpec spec{c.phi, c.k, parse_kernel(c.kernel), c.sign};
    spec.validate();
    return spec;
}

json versions() {
    return {{"losses", kLossesVersion},
            {"sensitivity", kSensitivityVersion},
            {"sampling", kSamplingVersion},
            {"eval", kEvalVersion},
            {"cli", kCliVersion}};
}

json header(const ExperimentConfig& c) {
    json r;
    r["schema_version"] = kReportSchemaVersion;
    r["task"] = std::string(to_string(c.task));
    r["versions"] = versions();
    if (c.seed) r["seed"] = *c.seed;
    return r;
}

json config_json(const ExperimentConfig& c) {
    json j;
    j["loss"] = std::string(to_string(c.phi));
    j["k"] = c.k;
    j["kernel"] = describe(parse_kernel(c.kernel));
    j["sign"] = c.sign == Sign::plus ? "plus" : "minus";
    j["source"] = c.source;
    if (is_synthetic(c.source)) j["n"] = c.n;
    j["bound"] = c.bound;
    j["sampling"] = c.sampling;
    j["trials"] = c.trials;
    if (c.phi == Phi::logistic) j["logistic_simple"] = c.logistic_simple;
    if (c.phi == Phi::relu) j["relu_norm"] = c.relu_norm == ReluNorm::shifted ? "shifted" : "plain";
    return j;
}

json candidates_json(const CandidateOptions& o) {
    return {{"strategy", std::string(to_string(o.strategy))},
            {"directions_per_shell", o.directions_per_shell},
            {"shell_min", o.shell_min},
            {"shell_max", o.shell_max}};
}

json profile_json(const SensitivityProfile& p) {
    return {{"source", std::string(to_string(p.source))},
            {"total", p.total},
            {"constant", p.constant},
            {"min", p.min_value()},
            {"max", p.max_value()}};
}

json data_json(const Dataset& d) {
    json j{{"n", d.size()}, {"d", d.dim()}};
    if (d.source()) j["generator"] = d.source()->describe();
    return j;
}

// Shared setup for the loss-based tasks.
struct Setup {
    LossSpec spec;
    ResolvedBound bound;
    SensitivityProfile profile;
    bool uniform = false;
};

Setup setup(const ExperimentConfig& c, const Dataset& data) {
    Setup s{loss_of(c), {}, {}, c.sampling == "uniform"};
    s.bound = resolve_bound(c.bound, data, s.spec.kernel);
    s.profile = compute_profile(s.spec, s.bound.bound, data, {c.logistic_simple, c.relu_norm});
    return s;
}

json bound_json(const ResolvedBound& b) {
    return {{"mode", b.bound.mode == DataBound::Mode::hard ? "hard" : "soft"},
            {"value", b.bound.value},
            {"origin", b.origin}};
}

Coreset draw(const Setup& s, const Dataset& data, std::size_t m, std::uint64_t seed) {
    return s.uniform ? sample_uniform(data, m, seed) : sample_sensitivity(data, s.profile, m, seed);
}

// Coreset rows are held in memory: refuse sizes whose point matrix would
// exceed this many doubles (1 GiB).
constexpr std::uint64_t kMaxCoresetDoubles = 1ull << 27;

std::size_t resolve_m(const ExperimentConfig& c, const Setup& s, std::size_t dim, json& sizing) {
    if (c.m) {
        sizing = {{"mode", "explicit"}, {"m", *c.m}};
        return *c.m;
    }
    const double C = theorem_constant_for(s.spec, s.bound.bound);
    const std::uint64_t m = theorem_sample_size(s.profile.total, C, *c.eps, *c.delta);
    sizing = {{"mode", "theorem"}, {"S", s.profile.total}, {"C", C}, {"eps", *c.eps}, {"delta", *c.delta}, {"m", m}};
    if (c.vc_dim)
        sizing["vc"] = {{"vc_dim", *c.vc_dim},
                        {"c_univ", c.c_univ},
                        {"m", vc_sample_size(s.profile.total, *c.eps, *c.delta, *c.vc_dim, c.c_univ)}};
    if (m > kMaxCoresetDoubles / (dim + 2))
        fail(ErrorKind::precondition,
             "theorem size m=" + std::to_string(m) + " is too large to sample in memory; pass --m or a larger --eps",
             "m");
    return static_cast<std::size_t>(m);
}

json run_build(const ExperimentConfig& c, std::ostream& console) {
    const Dataset data = load(c);
    const Setup s = setup(c, data);
    json r = header(c);
    r["config"] = config_json(c);
    r["data"] = data_json(data);
    r["bound"] = bound_json(s.bound);
    r["profile"] = profile_json(s.profile);
    json sizing;
    const std::size_t m = resolve_m(c, s, data.dim(), sizing);
    r["sizing"] = sizing;
    r["m"] = m;

    const Coreset core = draw(s, data, m, derive_seed(*c.seed, 0));
    std::ostringstream csv;
    write_coreset_csv(csv, core);
    std::vector<std::size_t> idx = core.source_indices;
    std::sort(idx.begin(), idx.end());
    r["results"] = {{"coreset_size", core.size()},
                    {"weight_sum", core.weights.sum()},
                    {"distinct_points", static_cast<std::size_t>(std::unique(idx.begin(), idx.end()) - idx.begin())},
                    {"digest", hex64(fnv1a(csv.str()))}};
    if (!c.coreset_out.empty()) {
        std::ofstream f(c.coreset_out, std::ios::binary);
        if (!f) fail(ErrorKind::io, "cannot write '" + c.coreset_out + "'", "coreset-out");
        f << csv.str();
        if (!f) fail(ErrorKind::io, "write failed for '" + c.coreset_out + "'", "coreset-out");
        r["results"]["coreset_file"] = c.coreset_out;
    }
    console << "built coreset m=" << m << " S=" << s.profile.total << " (" << to_string(s.profile.source) << ")\n";
    return r;
}

json run_eval(const ExperimentConfig& c, std::ostream& console) {
    const Dataset data = load(c);
    const Setup s = setup(c, data);
    json r = header(c);
    r["config"] = config_json(c);
    r["config"]["candidates"] = candidates_json(c.candidates);
    r["data"] = data_json(data);
    r["bound"] = bound_json(s.bound);
    r["profile"] = profile_json(s.profile);

    std::vector<Coreset> cores;
    std::vector<std::uint64_t> seeds;
    std::size_t m = 0;
    if (!c.coreset_in.empty()) {
        std::ifstream f(c.coreset_in);
        if (!f) fail(ErrorKind::io, "cannot open '" + c.coreset_in + "'", "coreset");
        cores.push_back(read_coreset_csv(f));
        seeds.push_back(0);
        m = cores.back().size();
        r["sizing"] = {{"mode", "file"}, {"m", m}, {"file", c.coreset_in}};
    } else {
        json sizing;
        m = resolve_m(c, s, data.dim(), sizing);
        r["sizing"] = sizing;
        for (std::size_t t = 0; t < c.trials; ++t) {
            seeds.push_back(derive_seed(*c.seed, t));
            cores.push_back(draw(s, data, m, seeds.back()));
        }
    }
    r["m"] = m;

    json trials = json::array();
    std::vector<double> sups;
    bool transfer_ok = true;
    for (std::size_t t = 0; t < cores.size(); ++t) {
        const CandidateSet cand =
            make_candidates(c.candidates, s.spec, data, cores[t], derive_seed(*c.seed, kCandidateStream));
        const SupError e = sup_relative_error(data, cores[t], s.spec, cand);
        json tj{{"trial", t},
                {"seed", seeds[t]},
                {"candidates", cand.size()},
                {"sup_error", e.value},
                {"mean_error", e.mean},
                {"argmax", e.argmax}};
        if (c.transfer) {
            const TransferResult tr = minimizer_transfer(data, cores[t], s.spec, c.candidates,
                                                         derive_seed(*c.seed, kCandidateStream));
            tj["transfer"] = {{"eps_hat", tr.eps_hat},
                              {"full_at_coreset_min", tr.full_at_coreset},
                              {"full_at_full_min", tr.full_at_full},
                              {"bound", tr.bound},
                              {"holds", tr.holds()}};
            transfer_ok = transfer_ok && tr.holds();
        }
        sups.push_back(e.value);
        trials.push_back(tj);
    }
    json results{{"trials", trials},
                 {"median_sup_error", median(sups)},
                 {"max_sup_error", *std::max_element(sups.begin(), sups.end())}};
    if (c.transfer) results["transfer_holds"] = transfer_ok;
    if (c.rademacher_trials > 0) {
        CandidateOptions dyadic = c.candidates;
        dyadic.strategy = CandidateStrategy::dyadic_shells;
        const CandidateSet cand = make_candidates(data.dim(), dyadic, derive_seed(*c.seed, kCandidateStream));
        const double est = estimate_rademacher(data, s.profile, s.spec, cand, m, c.rademacher_trials,
                                               derive_seed(*c.seed, kRademacherStream));
        const double C = theorem_constant_for(s.spec, s.bound.bound);
        json rj{{"estimate", est},
                {"trials", c.rademacher_trials},
                {"C", C},
                {"bound", C * std::sqrt(s.profile.total / static_cast<double>(m))}};
        results["rademacher"] = rj;
    }
    r["results"] = results;
    console << "eval m=" << m << " median sup error " << median(sups) << " over " << sups.size() << " trial(s)\n";
    return r;
}

json run_kde(const ExperimentConfig& c, std::ostream& console) {
    const Kernel kernel = parse_kernel(c.kernel);
    if (!kernel.is_normalized()) fail(ErrorKind::config, "--kernel: KDE needs gaussian, laplacian or exponential", "kernel");
    json r = header(c);
    r["config"] = {{"kernel", describe(kernel)},
                   {"source", c.source},
                   {"trials", c.trials},
                   {"probes", c.probes},
                   {"refine_starts", c.kde.refine_starts},
                   {"refine_iterations", c.kde.refine_iterations}};
    if (is_synthetic(c.source)) r["config"]["n"] = c.n;
    const std::size_t m = *c.m;
    r["m"] = m;
    const double threshold = 3.0 / std::sqrt(static_cast<double>(m));

    std::vector<std::optional<std::size_t>> dims;
    for (auto d : c.dims) dims.emplace_back(d);
    if (dims.empty()) dims.emplace_back(std::nullopt);

    json per_dim = json::array();
    std::vector<double> medians;
    for (const auto& dim : dims) {
        const Dataset data = load(c, dim);
        std::vector<double> errs;
        json trials = json::array();
        std::size_t within = 0;
        for (std::size_t t = 0; t < c.trials; ++t) {
            const std::uint64_t seed = derive_seed(*c.seed, t);
            const Coreset sample = sample_uniform(data, m, seed);
            const Matrix probes = make_kde_probes(data, sample, c.probes, derive_seed(*c.seed, kProbeStream + t));
            const KdeSupError e = kde_sup_error(data, sample, kernel, probes, c.kde);
            errs.push_back(e.value);
            within += e.value <= threshold;
            trials.push_back({{"trial", t}, {"seed", seed}, {"sup_error", e.value}, {"probe_sup_error", e.probe_value}});
        }
        medians.push_back(median(errs));
        per_dim.push_back({{"d", data.dim()},
                           {"data", data_json(data)},
                           {"trials", trials},
                           {"median_sup_error", medians.back()},
                           {"fraction_within_threshold", static_cast<double>(within) / static_cast<double>(c.trials)}});
        console << "kde d=" << data.dim() << " median sup error " << medians.back() << "\n";
    }
    const auto [lo, hi] = std::minmax_element(medians.begin(), medians.end());
    r["results"] = {{"threshold", threshold}, {"per_dim", per_dim}, {"median_spread", *hi / *lo}};
    return r;
}

json run_bench(const ExperimentConfig& c, std::ostream& console) {
    json r = header(c);
    r["config"] = config_json(c);
    r["config"]["candidates"] = candidates_json(c.candidates);
    r["config"]["m_levels"] = c.m_levels;

    std::vector<std::optional<std::size_t>> dims;
    for (auto d : c.dims) dims.emplace_back(d);
    if (dims.empty()) dims.emplace_back(std::nullopt);

    json per_dim = json::array();
    std::vector<std::vector<double>> medians; // [dim][level]
    for (const auto& dim : dims) {
        const Dataset data = load(c, dim);
        const Setup s = setup(c, data);
        json levels = json::array();
        medians.emplace_back();
        for (std::size_t m : c.m_levels) {
            const std::uint64_t level_seed = derive_seed(*c.seed, kLevelStream + m);
            std::vector<double> sups;
            for (std::size_t t = 0; t < c.trials; ++t) {
                const Coreset core = draw(s, data, m, derive_seed(level_seed, t));
                const CandidateSet cand =
                    make_candidates(c.candidates, s.spec, data, core, derive_seed(*c.seed, kCandidateStream));
                sups.push_back(sup_relative_error(data, core, s.spec, cand).value);
            }
            medians.back().push_back(median(sups));
            levels.push_back({{"m", m}, {"sup_errors", sups}, {"median_sup_error", medians.back().back()}});
        }
        json ratios = json::array();
        for (std::size_t i = 1; i < medians.back().size(); ++i)
            ratios.push_back(medians.back()[i] / medians.back()[i - 1]);
        per_dim.push_back({{"d", data.dim()},
                           {"data", data_json(data)},
                           {"bound", bound_json(s.bound)},
                           {"profile", profile_json(s.profile)},
                           {"levels", levels},
                           {"ratios", ratios}});
        console << "bench d=" << data.dim() << " medians";
        for (double v : medians.back()) console << ' ' << v;
        console << "\n";
    }
    json spread = json::array();
    for (std::size_t i = 0; i < c.m_levels.size(); ++i) {
        double lo = INFINITY, hi = 0;
        for (const auto& row : medians) {
            lo = std::min(lo, row[i]);
            hi = std::max(hi, row[i]);
        }
        spread.push_back({{"m", c.m_levels[i]}, {"max_over_min", hi / lo}});
    }
    r["results"] = {{"per_dim", per_dim}, {"dimension_spread", spread}};
    return r;
}

json run_verify(const ExperimentConfig& c, std::ostream& console) {
    json r = header(c);
    r["config"] = {{"step", c.grid.step}, {"max", c.grid.max}, {"ks", c.grid.ks}};
    json suites = json::array();
    bool all = true;
    for (Phi p : c.lemmas) {
        const BetaGridResult g = verify_beta_grid(p, c.grid);
        all = all && g.passed();
        suites.push_back({{"loss", std::string(to_string(p))},
                          {"checked", g.checked},
                          {"failures", g.failures},
                          {"worst_ratio_over_beta", g.worst_ratio_over_beta},
                          {"worst_at", {{"alpha", g.worst_alpha}, {"z", g.worst_z}, {"k", g.worst_k}}},
                          {"passed", g.passed()}});
        console << (g.passed() ? "PASS" : "FAIL") << " beta-" << to_string(p) << " checked=" << g.checked
                << " failures=" << g.failures << " worst ratio/beta=" << g.worst_ratio_over_beta << "\n";
    }
    r["results"] = {{"suites", suites}, {"all_passed", all}};
    return r;
}

} // namespace

json run(const ExperimentConfig& config, std::ostream& console) {
    config.validate();
    switch (config.task) {
    case Task::build: return run_build(config, console);
    case Task::eval: return run_eval(config, console);
    case Task::kde: return run_kde(config, console);
    case Task::bench: return run_bench(config, console);
    case Task::verify: return run_verify(config, console);
    }
    fail(ErrorKind::config, "unknown task", "task");
}

} // namespace coreset::cli
