// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [--only 1,4,7]

#include "coreset/cli.hpp"
#include "coreset/error.hpp"
#include "coreset/eval.hpp"
#include "coreset/rng.hpp"
#include "coreset/sampling.hpp"
#include "coreset/sensitivity.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace coreset;

namespace {

// ---- pinned tolerances ---------------------------------------------------------
constexpr double kBetaGridStep = 0.05;
constexpr double kTMeanTolerance = 0.02;
constexpr std::size_t kTDraws = 100000;
constexpr double kScalingRatioLo = 0.35, kScalingRatioHi = 0.65;
constexpr double kDimensionSpreadMax = 2.0;
constexpr double kKdeConstant = 3.0;
constexpr double kKdeFractionMin = 0.90;
constexpr double kKdeSpreadMax = 2.0;
constexpr std::size_t kHalfspaceTriples = 100000;
constexpr std::size_t kReluPairs = 100000;
constexpr double kGradientRelTol = 1e-6;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

LossSpec linear_loss(Phi phi, double k = 1.0) { return {phi, k, Kernel::linear(), Sign::plus}; }

CandidateOptions discrepancy() {
    CandidateOptions o;
    o.strategy = CandidateStrategy::discrepancy_augmented;
    return o;
}

std::vector<double> random_vector(Philox& r, std::size_t d, double scale) {
    std::vector<double> v(d);
    for (auto& x : v) x = scale * r.normal();
    return v;
}

Point pt(const std::vector<double>& v) { return {v.data(), v.size()}; }

// ---- criteria ------------------------------------------------------------------

Outcome beta_grids() {
    BetaGrid grid;
    grid.step = kBetaGridStep;
    Outcome o{true, ""};
    for (Phi p : {Phi::sigmoid, Phi::logistic, Phi::svm}) {
        const auto t0 = std::chrono::steady_clock::now();
        const BetaGridResult g = verify_beta_grid(p, grid);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.pass = o.pass && g.passed();
        o.detail += fmt("%s: %llu points, %llu failures, max ratio/beta %.4f, %.1fs; ", std::string(to_string(p)).c_str(),
                        static_cast<unsigned long long>(g.checked), static_cast<unsigned long long>(g.failures),
                        g.worst_ratio_over_beta, s);
    }
    return o;
}

Outcome sensitivity_values() {
    Matrix pts(3, 2);
    pts << 0.0, 0.0, 1.0, 0.0, 0.0, -1.0;
    const Dataset data = Dataset::uniform(pts);
    struct Case {
        const char* name;
        double got, want;
    };
    const std::vector<Case> cases{
        {"sigmoid E1=1", sens_sigmoid(DataBound::soft(1.0), 1.0, data).values[0], 92.0},
        {"logistic hard A=1", sens_logistic_hard(1.0, 1.0, data).values[0], 681.0},
        {"svm hard A=1", sens_svm_hard(1.0, 1.0, data).values[0], 10.0},
        {"svm soft y=0 E1=1", sens_svm_soft(1.0, 1.0, data).values[0], 28.0},
        {"relu hard A=1", sens_relu(DataBound::hard(1.0), 1.0, data).values[0], 22.0}};
    Outcome o{true, ""};
    for (const auto& c : cases) {
        o.pass = o.pass && c.got == c.want;
        o.detail += fmt("%s=%.17g; ", c.name, c.got);
    }
    return o;
}

Outcome augmented_identities() {
    Philox r(303);
    Outcome o{true, ""};
    double worst_mean_dev = 0.0, worst_max_over_S = 0.0, worst_exact_dev = 0.0;
    const Phi phis[] = {Phi::sigmoid, Phi::logistic, Phi::svm};
    for (int cfg = 0; cfg < 20; ++cfg) {
        const std::size_t d = 2 + static_cast<std::size_t>(r.uniform() * 7);
        const std::size_t n = 500 + static_cast<std::size_t>(r.uniform() * 1500);
        SyntheticSource src = cfg % 3 == 0   ? SyntheticSource::gaussian_iso(d, 0.3 + r.uniform())
                              : cfg % 3 == 1 ? SyntheticSource::uniform_ball(d, 0.5 + r.uniform())
                                             : SyntheticSource::gaussian_scaled_to_ball(d);
        const Dataset data = generate(src, n, derive_seed(303, static_cast<std::uint64_t>(cfg)));
        const LossSpec spec = linear_loss(phis[cfg % 3], std::exp(std::log(0.1) + r.uniform() * std::log(100.0)));
        const auto bound = src.hard_bound() && cfg % 2 ? DataBound::hard(*src.hard_bound())
                                                       : DataBound::soft(estimate_e1(data));
        ProfileOptions popt;
        popt.logistic_simple = cfg % 4 == 1;
        const SensitivityProfile prof = compute_profile(spec, bound, data, popt);
        const auto w = random_vector(r, d, 0.2 + 2.0 * r.uniform());
        const AugmentedFamily T(data, prof, spec, pt(w));

        const Vector q = sensitivity_distribution(data, prof);
        double tmax = 0.0, exact = 0.0;
        std::vector<double> tv(n);
        for (std::size_t i = 0; i < n; ++i) {
            tv[i] = T(i);
            tmax = std::max(tmax, tv[i]);
            exact += q[static_cast<Eigen::Index>(i)] * tv[i];
        }
        const IndexSampler draw(std::span<const double>(q.data(), n));
        Philox rng(derive_seed(304, static_cast<std::uint64_t>(cfg)));
        double mc = 0.0;
        for (std::size_t j = 0; j < kTDraws; ++j) mc += tv[draw(rng)];
        mc /= static_cast<double>(kTDraws);
        const bool ok = tmax <= prof.total && std::abs(mc - 1.0) <= kTMeanTolerance;
        o.pass = o.pass && ok;
        worst_mean_dev = std::max(worst_mean_dev, std::abs(mc - 1.0));
        worst_max_over_S = std::max(worst_max_over_S, tmax / prof.total);
        worst_exact_dev = std::max(worst_exact_dev, std::abs(exact - 1.0));
        if (!ok)
            o.detail += fmt("config %d (%s, %s) max T/S=%.4g mean T=%.4f; ", cfg, std::string(to_string(spec.phi)).c_str(),
                            std::string(to_string(prof.source)).c_str(), tmax / prof.total, mc);
    }
    o.detail += fmt("20 configs: max T/S %.4g, worst |MC mean - 1| %.4f, worst |E_q T - 1| %.2e", worst_max_over_S,
                    worst_mean_dev, worst_exact_dev);
    return o;
}

Outcome scaling_law() {
    const Dataset data = generate(SyntheticSource::gaussian_scaled_to_ball(10), 20000, 404);
    const std::vector<std::size_t> levels{250, 1000, 4000};
    Outcome o{true, ""};
    for (Phi p : {Phi::sigmoid, Phi::logistic, Phi::svm}) {
        const LossSpec spec = linear_loss(p);
        std::vector<double> med;
        for (std::size_t m : levels) {
            std::vector<double> sups;
            for (std::uint64_t s = 0; s < 20; ++s) {
                const Coreset c = sample_uniform(data, m, derive_seed(405 + m, s));
                const CandidateSet cand = make_candidates(discrepancy(), spec, data, c, 406);
                sups.push_back(sup_relative_error(data, c, spec, cand).value);
            }
            med.push_back(median(sups));
        }
        o.detail += fmt("%s medians %.4g %.4g %.4g ratios", std::string(to_string(p)).c_str(), med[0], med[1], med[2]);
        for (std::size_t i = 1; i < med.size(); ++i) {
            const double ratio = med[i] / med[i - 1];
            o.pass = o.pass && ratio >= kScalingRatioLo && ratio <= kScalingRatioHi;
            o.detail += fmt(" %.3f", ratio);
        }
        o.detail += "; ";
    }
    return o;
}

Outcome dimension_independence() {
    const LossSpec spec = linear_loss(Phi::sigmoid);
    std::vector<double> med;
    Outcome o{true, ""};
    for (std::size_t d : {5, 20, 100}) {
        const Dataset data = generate(SyntheticSource::uniform_ball(d, 1.0), 20000, 500 + d);
        const auto prof = sens_sigmoid(DataBound::hard(1.0), 1.0, data);
        std::vector<double> sups;
        for (std::uint64_t s = 0; s < 20; ++s) {
            const Coreset c = sample_sensitivity(data, prof, 2000, derive_seed(501 + d, s));
            const CandidateSet cand = make_candidates(discrepancy(), spec, data, c, 502);
            sups.push_back(sup_relative_error(data, c, spec, cand).value);
        }
        med.push_back(median(sups));
        o.detail += fmt("d=%zu median %.4g; ", d, med.back());
    }
    const double spread = *std::max_element(med.begin(), med.end()) / *std::min_element(med.begin(), med.end());
    o.pass = spread < kDimensionSpreadMax;
    o.detail += fmt("max/min %.3f", spread);
    return o;
}

Outcome rademacher_bound() {
    const Dataset data = generate(SyntheticSource::gaussian_scaled_to_ball(10), 20000, 600);
    const LossSpec spec = linear_loss(Phi::sigmoid);
    const DataBound bound = DataBound::hard(1.0);
    const auto prof = sens_sigmoid(bound, 1.0, data);
    const double C = theorem_constant_for(spec, bound);
    const CandidateSet cand = make_candidates(10, {}, 601);
    Outcome o{true, fmt("S=%g C=%g; ", prof.total, C)};
    for (std::size_t m : {100, 400, 1600}) {
        const double limit = C * std::sqrt(prof.total / static_cast<double>(m));
        double worst = -INFINITY;
        for (std::uint64_t s = 0; s < 10; ++s) {
            const double est = estimate_rademacher(data, prof, spec, cand, m, 5, derive_seed(602 + m, s));
            worst = std::max(worst, est);
            o.pass = o.pass && est <= limit;
        }
        o.detail += fmt("m=%zu max estimate %.4g <= %.4g; ", m, worst, limit);
    }
    return o;
}

Outcome kde_criterion() {
    const Kernel g = Kernel::gaussian(1.0);
    const std::size_t m = 2000;
    const double threshold = kKdeConstant / std::sqrt(static_cast<double>(m));
    std::vector<double> med;
    Outcome o{true, fmt("threshold %.4f; ", threshold)};
    for (std::size_t d : {2, 10, 50}) {
        const Dataset data = generate(SyntheticSource::gaussian_iso(d, 1.0 / std::sqrt(static_cast<double>(d))), 50000,
                                      700 + d);
        std::vector<double> errs;
        std::size_t within = 0;
        for (std::uint64_t t = 0; t < 20; ++t) {
            const Coreset c = sample_uniform(data, m, derive_seed(701 + d, t));
            const Matrix probes = make_kde_probes(data, c, 10000, derive_seed(702 + d, t));
            const double e = kde_sup_error(data, c, g, probes).value;
            errs.push_back(e);
            within += e <= threshold;
        }
        const double frac = static_cast<double>(within) / 20.0;
        med.push_back(median(errs));
        o.pass = o.pass && frac >= kKdeFractionMin;
        o.detail += fmt("d=%zu within %.2f median %.4f max %.4f; ", d, frac, med.back(),
                        *std::max_element(errs.begin(), errs.end()));
    }
    const double spread = *std::max_element(med.begin(), med.end()) / *std::min_element(med.begin(), med.end());
    o.pass = o.pass && spread <= kKdeSpreadMax;
    o.detail += fmt("median max/min %.3f", spread);
    return o;
}

Outcome halfspace_structure() {
    Philox r(800);
    Outcome o{true, ""};
    for (Phi p : {Phi::sigmoid, Phi::logistic, Phi::svm}) {
        std::size_t mismatches = 0, inside = 0;
        for (std::size_t i = 0; i < kHalfspaceTriples; ++i) {
            const std::size_t d = 1 + i % 6;
            const double k = std::exp(std::log(0.1) + r.uniform() * std::log(100.0));
            const LossSpec spec = linear_loss(p, k);
            const auto x = random_vector(r, d, 2.0 * r.uniform());
            const auto w = random_vector(r, d, 2.0 * r.uniform());
            const double loss = reg_loss(spec, pt(x), pt(w));
            double rr;
            if (i % 2) {
                // near the boundary, moved off it by a relative 1e-9..1e-3
                const double rel = std::pow(10.0, -9.0 + 6.0 * r.uniform());
                rr = loss * (1.0 + (r.uniform() < 0.5 ? -rel : rel));
            } else {
                rr = rkhs_norm_sq(spec.kernel, pt(w)) / k + 3.0 * r.uniform() - 0.5;
                if (std::abs(rr - loss) <= 1e-9 * std::max(1.0, loss)) rr += 1e-6;
            }
            const auto [direct, derived] = sublevel_halfspace_check(spec, pt(w), rr, pt(x));
            mismatches += direct != derived;
            inside += direct;
        }
        o.pass = o.pass && mismatches == 0;
        o.detail += fmt("%s: %zu mismatches (%zu of %zu above r); ", std::string(to_string(p)).c_str(), mismatches,
                        inside, kHalfspaceTriples);
    }
    return o;
}

Outcome transfer() {
    const Dataset data = generate(SyntheticSource::gaussian_scaled_to_ball(10), 20000, 900);
    const LossSpec spec = linear_loss(Phi::logistic);
    const auto prof = sens_logistic_hard(1.0, 1.0, data);
    Outcome o{true, ""};
    double worst_slack = INFINITY, worst_eps = 0.0;
    for (std::uint64_t t = 0; t < 10; ++t) {
        const Coreset c = sample_sensitivity(data, prof, 4000, derive_seed(901, t));
        const TransferResult tr = minimizer_transfer(data, c, spec, {}, 902);
        o.pass = o.pass && tr.holds();
        worst_eps = std::max(worst_eps, tr.eps_hat);
        worst_slack = std::min(worst_slack, tr.bound * tr.full_at_full - tr.full_at_coreset);
    }
    o.detail = fmt("10 trials, max eps_hat %.4g, min bound slack %.3g", worst_eps, worst_slack);
    return o;
}

Outcome relu_and_gradients() {
    Philox r(1000);
    std::size_t bad_identity = 0;
    for (std::size_t i = 0; i < kReluPairs; ++i) {
        const std::size_t d = 1 + i % 8;
        const auto x = random_vector(r, d, 1.0 + 3.0 * r.uniform());
        const auto w = random_vector(r, d, 1.0 + 3.0 * r.uniform());
        std::vector<double> nw(w);
        for (auto& v : nw) v = -v;
        const double k = std::exp(std::log(0.1) + r.uniform() * std::log(100.0));
        // phi(t) = max(0, -t) at w equals the relu loss at -w
        const double lhs = std::max(0.0, -kernel_value(Kernel::linear(), pt(x), pt(w))) +
                           rkhs_norm_sq(Kernel::linear(), pt(w)) / k;
        bad_identity += lhs != relu_loss(k, pt(x), pt(nw));
    }
    double worst = 0.0;
    for (int cfg = 0; cfg < 100; ++cfg) {
        const auto d = static_cast<Eigen::Index>(1 + cfg % 10);
        const Eigen::Index n = 20 + cfg;
        Matrix pts(n, d);
        for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = r.normal();
        Vector wts(n);
        for (auto& v : wts) v = 0.1 + r.uniform();
        Vector w(d);
        for (auto& v : w) v = r.normal();
        const LossSpec spec{cfg % 2 ? Phi::logistic : Phi::sigmoid, 0.2 + 5.0 * r.uniform(), Kernel::linear(),
                            cfg % 3 ? Sign::plus : Sign::minus};
        const Vector g = reg_gradient(spec, pts, wts, w);
        Vector fd(d);
        for (Eigen::Index j = 0; j < d; ++j) {
            const double h = 1e-5 * std::max(1.0, std::abs(w[j]));
            Vector a = w, b = w;
            a[j] += h;
            b[j] -= h;
            fd[j] = (reg_objective(spec, pts, wts, a) - reg_objective(spec, pts, wts, b)) / (2 * h);
        }
        worst = std::max(worst, (g - fd).norm() / g.norm());
    }
    return {bad_identity == 0 && worst <= kGradientRelTol,
            fmt("identity mismatches %zu of %zu; worst gradient relative error %.3g over 100 configs", bad_identity,
                kReluPairs, worst)};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "coreset-acceptance-determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::vector<std::vector<std::string>> cases{
        {"build", "--loss", "logistic", "--source", "gaussian-ball:d=6", "--n", "5000", "--m", "400", "--seed", "77",
         "--coreset-out", "CORE"},
        {"eval", "--loss", "svm", "--source", "gaussian:d=4,scale=0.5", "--n", "4000", "--m", "300", "--trials", "3",
         "--candidates", "discrepancy", "--transfer", "--rademacher-trials", "3", "--seed", "78"},
        {"eval", "--loss", "relu", "--source", "ball:d=3,r=2", "--n", "3000", "--m", "200", "--seed", "79"},
        {"kde", "--source", "gaussian:d=5,scale=0.45", "--n", "5000", "--m", "300", "--trials", "3", "--probes", "500",
         "--seed", "80"},
        {"bench", "--loss", "sigmoid", "--source", "ball:d=4,r=1", "--n", "4000", "--m-levels", "100,400", "--trials",
         "3", "--dims", "4,8", "--seed", "81"},
        {"verify", "--step", "0.5", "--max", "20"}};
    Outcome o{true, ""};
    int idx = 0;
    for (auto args : cases) {
        std::string bytes[2], core[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path out = dir / fmt("r%d_%d.json", idx, rep);
            const fs::path cpath = dir / fmt("c%d.csv", idx);
            std::vector<std::string> a = args;
            for (auto& s : a)
                if (s == "CORE") s = cpath.string();
            a.insert(a.begin(), "coreset");
            a.push_back("--out");
            a.push_back(out.string());
            std::vector<const char*> argv;
            for (const auto& s : a) argv.push_back(s.c_str());
            const auto cfg = cli::parse_args(static_cast<int>(argv.size()), argv.data());
            std::ostringstream console;
            const auto report = cli::run(cfg, console);
            cli::write_outputs(cfg, report, {});
            bytes[rep] = read_file(out);
            if (fs::exists(cpath)) {
                core[rep] = read_file(cpath);
                fs::remove(cpath);
            }
        }
        const bool same = bytes[0] == bytes[1] && core[0] == core[1] && !bytes[0].empty();
        o.pass = o.pass && same;
        o.detail += fmt("%s %s (%zu bytes); ", args[0].c_str(), same ? "identical" : "DIFFERENT", bytes[0].size());
        ++idx;
    }
    fs::remove_all(dir);
    return o;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "criteria to run")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"beta-lemma grids", beta_grids},
        {"sensitivity unit values", sensitivity_values},
        {"augmented-family identities", augmented_identities},
        {"error scaling law", scaling_law},
        {"dimension independence", dimension_independence},
        {"rademacher bound", rademacher_bound},
        {"kde sup error", kde_criterion},
        {"halfspace structure", halfspace_structure},
        {"downstream transfer", transfer},
        {"relu identity and gradients", relu_and_gradients},
        {"report determinism", determinism}};

    const std::set<int> chosen(only.begin(), only.end());
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!chosen.empty() && !chosen.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        all = all && out.pass;
        std::cout << (out.pass ? "PASS" : "FAIL") << ' ' << id << ' ' << criteria[i].first << " [" << fmt("%.1f", secs)
                  << "s] " << out.detail << std::endl;
    }
    return all ? 0 : 1;
}
