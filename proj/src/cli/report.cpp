#include "coreset/cli.hpp"

#include "coreset/error.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

namespace coreset::cli {

using nlohmann::json;

json error_json(const std::exception& e) {
    json j;
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        j["kind"] = std::string(kind_name(err->kind()));
        if (!err->field().empty()) j["field"] = err->field();
        if (err->index()) j["index"] = *err->index();
    } else {
        j["kind"] = "internal";
    }
    j["message"] = e.what();
    j["exit_code"] = exit_code_for(e);
    return {{"error", j}};
}

int exit_code_for(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) return exit_code(err->kind());
    if (dynamic_cast<const std::bad_alloc*>(&e)) return 4;
    return 1;
}

namespace {

void write_json(const std::string& path, const json& j, const std::string& field) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::io, "cannot write '" + path + "'", field);
    f << j.dump(2) << '\n';
    if (!f) fail(ErrorKind::io, "write failed for '" + path + "'", field);
}

} // namespace

void write_outputs(const ExperimentConfig& config, const json& report, const RunTiming& timing) {
    json t{{"task", std::string(to_string(config.task))}, {"wall_seconds", timing.wall_seconds}};
    if (config.seed) t["seed"] = *config.seed;
    if (config.out.empty()) {
        std::cout << report.dump(2) << '\n';
        std::cerr << t.dump() << '\n';
        return;
    }
    write_json(config.out, report, "out");
    write_json(config.out + ".timing.json", t, "out");
}

int main_entry(int argc, const char* const* argv) {
    try {
        ExperimentConfig config;
        try {
            config = parse_args(argc, argv);
        } catch (const CLI::CallForHelp&) {
            // parse_args has already printed the help text
            return 0;
        }
        std::ostream& console = config.out.empty() ? std::cerr : std::cout;
        const auto start = std::chrono::steady_clock::now();
        const json report = run(config, console);
        const RunTiming timing{std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()};
        write_outputs(config, report, timing);
        if (config.task == Task::verify && !report["results"]["all_passed"].get<bool>())
            fail(ErrorKind::numeric, "beta grid check failed", "lemmas");
        return 0;
    } catch (const std::exception& e) {
        std::cerr << error_json(e).dump() << '\n';
        return exit_code_for(e);
    }
}

} // namespace coreset::cli
