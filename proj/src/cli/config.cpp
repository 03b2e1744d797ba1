#include "coreset/cli.hpp"

#include "coreset/error.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <iostream>

namespace coreset::cli {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& message) {
    fail(ErrorKind::config, "--" + field + ": " + message, field);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto p = s.find(sep);
        out.push_back(s.substr(0, p));
        if (p == std::string_view::npos) break;
        s.remove_prefix(p + 1);
    }
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text, const std::string& field) {
    std::vector<std::size_t> out;
    if (text.empty()) return out;
    for (auto part : split(text, ',')) {
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || p != part.data() + part.size() || v == 0)
            bad(field, "expected a comma-separated list of positive integers");
        out.push_back(v);
    }
    return out;
}

std::vector<double> parse_reals(const std::string& text, const std::string& field) {
    std::vector<double> out;
    for (auto part : split(text, ',')) {
        double v = 0;
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || p != part.data() + part.size()) bad(field, "expected a comma-separated list of numbers");
        out.push_back(v);
    }
    return out;
}

struct RawArgs {
    std::string loss = "logistic", sign = "plus", relu_norm = "shifted", candidates = "dyadic";
    std::string dims, m_levels, ks, lemmas;
    std::string kde_kernel = "gaussian:bw=1";
};

void add_loss_options(CLI::App* app, ExperimentConfig& c, RawArgs& raw) {
    app->add_option("--loss", raw.loss, "sigmoid | logistic | svm | relu");
    app->add_option("--k", c.k, "regularization parameter (> 0)");
    app->add_option("--kernel", c.kernel, "linear | shifted-linear | gaussian[:bw=h] | laplacian[:bw=h] | exponential[:bw=h]");
    app->add_option("--sign", raw.sign, "plus | minus");
}

void add_data_options(CLI::App* app, ExperimentConfig& c) {
    app->add_option("--source", c.source, "CSV path or gaussian:d=..,scale=.. | ball:d=..,r=.. | gaussian-ball:d=..");
    app->add_option("--n", c.n, "rows to generate for synthetic sources");
    app->add_flag("--csv-header", c.csv_header, "the CSV has a header line");
    app->add_flag("--weight-col", c.weight_column, "the last CSV column holds point weights");
    app->add_option("--seed", c.seed, "64-bit seed (required)");
    app->add_option("--out", c.out, "report path (stdout when omitted)");
}

void add_bound_options(CLI::App* app, ExperimentConfig& c, RawArgs& raw) {
    app->add_option("--bound", c.bound, "auto | hard[:A=v] | soft[:E1=v]");
    app->add_flag("--logistic-simple", c.logistic_simple, "use the squared-norm logistic profile");
    app->add_option("--relu-norm", raw.relu_norm, "shifted | plain");
    app->add_option("--sampling", c.sampling, "sensitivity | uniform");
}

void add_size_options(CLI::App* app, ExperimentConfig& c) {
    app->add_option("--m", c.m, "coreset size");
    app->add_option("--eps", c.eps, "target relative error; sizes the coreset with --delta");
    app->add_option("--delta", c.delta, "failure probability");
}

void add_candidate_options(CLI::App* app, ExperimentConfig& c, RawArgs& raw) {
    app->add_option("--candidates", raw.candidates, "dyadic | minimizer | discrepancy");
    app->add_option("--directions", c.candidates.directions_per_shell, "directions per shell");
    app->add_option("--shell-min", c.candidates.shell_min, "smallest shell exponent");
    app->add_option("--shell-max", c.candidates.shell_max, "largest shell exponent");
    app->add_option("--optimizer-steps", c.candidates.optimizer.steps, "gradient steps for minimizers");
}

} // namespace

std::string_view to_string(Task task) {
    switch (task) {
    case Task::build: return "build";
    case Task::eval: return "eval";
    case Task::kde: return "kde";
    case Task::bench: return "bench";
    case Task::verify: return "verify";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (task == Task::verify) {
        if (!(grid.step > 0.0)) bad("step", "must be positive");
        if (!(grid.max >= 0.0)) bad("max", "must be nonnegative");
        if (grid.ks.empty()) bad("ks", "needs at least one value");
        for (double v : grid.ks)
            if (!(v > 0.0)) bad("ks", "values must be positive");
        if (lemmas.empty()) bad("lemmas", "needs at least one loss");
        for (Phi p : lemmas)
            if (p == Phi::relu) bad("lemmas", "relu has no beta lemma");
        return;
    }
    if (!seed) bad("seed", "is required");
    if (source.empty()) bad("source", "is required");
    if (!(k > 0.0)) bad("k", "must be positive");
    if (trials == 0) bad("trials", "must be at least 1");
    if (sampling != "sensitivity" && sampling != "uniform") bad("sampling", "must be sensitivity or uniform");
    if (n == 0) bad("n", "must be positive");

    if (task == Task::bench) {
        if (m_levels.empty()) bad("m-levels", "is required");
        if (m || eps || delta) bad("m", "bench takes --m-levels instead");
    } else if (task == Task::kde) {
        if (!m) bad("m", "is required");
        if (eps || delta) bad("eps", "kde takes an explicit --m");
        if (probes == 0) bad("probes", "must be positive");
    } else if (task == Task::eval && !coreset_in.empty()) {
        if (m || eps || delta) bad("m", "not used with --coreset");
    } else {
        const bool explicit_m = m.has_value();
        const bool theorem = eps.has_value() || delta.has_value();
        if (explicit_m == theorem) bad("m", "give exactly one of --m or --eps/--delta");
        if (theorem && (!eps || !delta)) bad(eps ? "delta" : "eps", "--eps and --delta go together");
        if (explicit_m && *m == 0) bad("m", "must be positive");
        if (eps && !(*eps > 0.0 && *eps < 1.0)) bad("eps", "must lie in (0, 1)");
        if (delta && !(*delta > 0.0 && *delta < 1.0)) bad("delta", "must lie in (0, 1)");
    }
    if (vc_dim && !(*vc_dim > 0.0)) bad("vc-dim", "must be positive");
    if (!(c_univ > 0.0)) bad("c-univ", "must be positive");
    if (candidates.directions_per_shell == 0) bad("directions", "must be positive");
    if (candidates.shell_max < candidates.shell_min) bad("shell-max", "must be >= --shell-min");
    if (candidates.optimizer.steps == 0) bad("optimizer-steps", "must be positive");
}

ExperimentConfig parse_args(int argc, const char* const* argv) {
    ExperimentConfig c;
    RawArgs raw;
    CLI::App app{"Sensitivity-sampling coresets for regularized losses"};
    app.require_subcommand(1);

    auto* build = app.add_subcommand("build", "sample a coreset and write it out");
    add_loss_options(build, c, raw);
    add_data_options(build, c);
    add_bound_options(build, c, raw);
    add_size_options(build, c);
    build->add_option("--vc-dim", c.vc_dim, "also report the VC-based size for this dimension");
    build->add_option("--c-univ", c.c_univ, "constant of the VC-based size");
    build->add_option("--coreset-out", c.coreset_out, "write the coreset as CSV");

    auto* eval = app.add_subcommand("eval", "measure coreset error over candidate parameters");
    add_loss_options(eval, c, raw);
    add_data_options(eval, c);
    add_bound_options(eval, c, raw);
    add_size_options(eval, c);
    add_candidate_options(eval, c, raw);
    eval->add_option("--trials", c.trials, "independent coresets");
    eval->add_option("--coreset", c.coreset_in, "evaluate a coreset CSV instead of sampling");
    eval->add_option("--rademacher-trials", c.rademacher_trials, "add a Rademacher estimate with this many trials");
    eval->add_flag("--transfer", c.transfer, "compare coreset and full minimizers");

    auto* kde = app.add_subcommand("kde", "kernel density sup error of uniform samples");
    add_data_options(kde, c);
    kde->add_option("--kernel", raw.kde_kernel, "gaussian[:bw=h] | laplacian[:bw=h] | exponential[:bw=h]");
    kde->add_option("--m", c.m, "sample size");
    kde->add_option("--trials", c.trials, "independent samples");
    kde->add_option("--probes", c.probes, "probe points per trial");
    kde->add_option("--refine-starts", c.kde.refine_starts, "probes refined by local ascent (0 disables)");
    kde->add_option("--refine-iterations", c.kde.refine_iterations, "ascent iterations per start");
    kde->add_option("--dims", raw.dims, "comma-separated dimensions for the synthetic source");

    auto* bench = app.add_subcommand("bench", "error scaling over coreset sizes and dimensions");
    add_loss_options(bench, c, raw);
    add_data_options(bench, c);
    add_bound_options(bench, c, raw);
    add_candidate_options(bench, c, raw);
    bench->add_option("--m-levels", raw.m_levels, "comma-separated coreset sizes");
    bench->add_option("--trials", c.trials, "seeds per level");
    bench->add_option("--dims", raw.dims, "comma-separated dimensions for the synthetic source");

    auto* verify = app.add_subcommand("verify", "check the beta bounds on a grid");
    verify->add_option("--step", c.grid.step, "grid step for alpha and z");
    verify->add_option("--max", c.grid.max, "grid upper end");
    verify->add_option("--ks", raw.ks, "comma-separated k values");
    verify->add_option("--lemmas", raw.lemmas, "comma-separated losses (sigmoid,logistic,svm)");
    verify->add_option("--out", c.out, "report path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        throw;
    } catch (const CLI::ParseError& e) {
        fail(ErrorKind::config, e.what(), "arguments");
    }

    if (build->parsed()) c.task = Task::build;
    else if (eval->parsed()) c.task = Task::eval;
    else if (kde->parsed()) c.task = Task::kde;
    else if (bench->parsed()) c.task = Task::bench;
    else c.task = Task::verify;

    c.phi = parse_phi(raw.loss);
    if (raw.sign == "plus") c.sign = Sign::plus;
    else if (raw.sign == "minus") c.sign = Sign::minus;
    else bad("sign", "must be plus or minus");
    if (raw.relu_norm == "shifted") c.relu_norm = ReluNorm::shifted;
    else if (raw.relu_norm == "plain") c.relu_norm = ReluNorm::plain;
    else bad("relu-norm", "must be shifted or plain");
    c.candidates.strategy = parse_candidate_strategy(raw.candidates);
    if (c.candidates.strategy == CandidateStrategy::fixed) bad("candidates", "fixed lists are library-only");
    c.dims = parse_sizes(raw.dims, "dims");
    c.m_levels = parse_sizes(raw.m_levels, "m-levels");
    if (!raw.ks.empty()) c.grid.ks = parse_reals(raw.ks, "ks");
    if (!raw.lemmas.empty()) {
        c.lemmas.clear();
        for (auto name : split(raw.lemmas, ',')) c.lemmas.push_back(parse_phi(name));
    }
    if (c.task == Task::kde) c.kernel = raw.kde_kernel;
    c.validate();
    return c;
}

} // namespace coreset::cli
