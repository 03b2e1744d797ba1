#pragma once

#include "coreset/eval.hpp"
#include "coreset/sensitivity.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coreset::cli {

enum class Task { build, eval, kde, bench, verify };

std::string_view to_string(Task task);

struct ExperimentConfig {
    Task task = Task::build;

    // loss
    Phi phi = Phi::logistic;
    double k = 1.0;
    std::string kernel = "linear";
    Sign sign = Sign::plus;

    // data
    std::string source;   // CSV path or synthetic descriptor
    std::size_t n = 10000; // rows generated for synthetic sources
    bool csv_header = false;
    bool weight_column = false;
    std::vector<std::size_t> dims; // kde/bench: override the synthetic dimension

    // "auto", "hard", "hard:A=<v>", "soft", "soft:E1=<v>"
    std::string bound = "auto";
    bool logistic_simple = false;
    ReluNorm relu_norm = ReluNorm::shifted;

    // sizing: exactly one of m or (eps, delta); bench uses m_levels instead
    std::optional<std::size_t> m;
    std::optional<double> eps, delta;
    std::optional<double> vc_dim;
    double c_univ = 1.0;
    std::vector<std::size_t> m_levels;

    std::string sampling = "sensitivity"; // or "uniform"
    std::size_t trials = 1;
    std::optional<std::uint64_t> seed;

    CandidateOptions candidates;
    std::size_t rademacher_trials = 0; // eval: > 0 adds a Rademacher estimate
    bool transfer = false;             // eval: add the minimizer comparison

    std::size_t probes = 10000;
    KdeOptions kde;

    BetaGrid grid;
    std::vector<Phi> lemmas{Phi::sigmoid, Phi::logistic, Phi::svm};

    std::string coreset_in;  // eval: evaluate this coreset instead of sampling
    std::string coreset_out; // build: CSV dump
    std::string out;         // report path; empty writes to stdout

    //! Throws Error(config) naming the first offending field.
    void validate() const;
};

//! Parses argv into a config. Throws Error(config) on bad flags.
ExperimentConfig parse_args(int argc, const char* const* argv);

//! Runs the task and returns the report. Deterministic for a fixed config:
//! wall time is kept out of the report (see RunTiming).
nlohmann::json run(const ExperimentConfig& config, std::ostream& console);

struct RunTiming {
    double wall_seconds = 0.0;
};

//! Report plus a small timing sidecar written next to it.
void write_outputs(const ExperimentConfig& config, const nlohmann::json& report, const RunTiming& timing);

//! Machine-readable error document.
nlohmann::json error_json(const std::exception& e);
int exit_code_for(const std::exception& e);

//! Full command-line entry point; returns the process exit code.
int main_entry(int argc, const char* const* argv);

} // namespace coreset::cli
