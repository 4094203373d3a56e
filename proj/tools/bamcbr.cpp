// bamcbr: run scenarios, compare reports, inspect case bases, validate configs.
//
// Exit codes: 0 success, 1 I/O failure or skipped case records,
// 2 configuration or input-format error, 3 reports not comparable.

#include "bamcbr/case_store.hpp"
#include "bamcbr/errors.hpp"
#include "bamcbr/report.hpp"
#include "bamcbr/scenario.hpp"
#include "bamcbr/simulation.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bamcbr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitComparability = 3;

struct RunJob {
    std::string config;
    std::string out;
    std::string cases_out;
    std::optional<std::uint64_t> seed;
};

struct RunResult {
    SimulationReport report;
    std::string error;
    int code = kExitOk;
};

RunResult execute(const RunJob& job) {
    RunResult result;
    try {
        ScenarioConfig cfg = job.config.empty() ? default_scenario() : load_scenario(job.config);
        if (job.seed) cfg.seed = *job.seed;
        Simulation sim(cfg);
        sim.run();
        result.report = sim.report();
        if (!job.out.empty()) write_report_file(result.report, job.out);
        if (!job.cases_out.empty()) {
            if (!sim.engine()) throw ConfigError("--cases-out needs a cognitive run");
            write_cases_file(sim.engine()->positive(), sim.engine()->negative(), job.cases_out);
        }
    } catch (const ConfigError& e) {
        result.code = kExitConfig;
        result.error = (job.config.empty() ? std::string("default scenario") : job.config) + ": " + e.what();
    } catch (const std::exception& e) {
        result.code = kExitIo;
        result.error = e.what();
    }
    return result;
}

std::vector<RunJob> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read batch manifest '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) { return p.empty() ? p : (base / p).string(); };
    std::vector<RunJob> jobs;
    if (!doc.contains("runs") || !doc["runs"].is_array()) throw ConfigError("manifest: 'runs' must be an array");
    std::size_t i = 0;
    for (const auto& r : doc["runs"]) {
        const std::string where = "manifest: runs[" + std::to_string(i++) + "]";
        if (!r.is_object() || !r.contains("config") || !r["config"].is_string())
            throw ConfigError(where + ".config must be a path");
        RunJob job;
        job.config = resolve(r["config"].get<std::string>());
        if (r.contains("out")) job.out = resolve(r["out"].get<std::string>());
        if (r.contains("cases_out")) job.cases_out = resolve(r["cases_out"].get<std::string>());
        if (r.contains("seed")) job.seed = r["seed"].get<std::uint64_t>();
        jobs.push_back(std::move(job));
    }
    return jobs;
}

std::vector<RunResult> execute_parallel(const std::vector<RunJob>& jobs) {
    const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
    std::vector<RunResult> results(jobs.size());
    for (std::size_t first = 0; first < jobs.size(); first += width) {
        std::vector<std::future<RunResult>> running;
        const std::size_t last = std::min(jobs.size(), first + width);
        for (std::size_t i = first; i < last; ++i)
            running.push_back(std::async(std::launch::async, execute, std::cref(jobs[i])));
        for (std::size_t i = first; i < last; ++i) results[i] = running[i - first].get();
    }
    return results;
}

json run_digest(const SimulationReport& r) {
    const auto& t = r.totals;
    json timeline = json::array();
    for (const auto& e : r.timeline)
        timeline.push_back({{"time", e.time}, {"model", std::string(to_string(e.model))}, {"cause", e.cause}});
    return {{"label", r.label},
            {"seed", r.seed},
            {"schedule_hash", r.schedule_hash},
            {"config_hash", r.config_hash},
            {"arrivals", t.total_arrivals()},
            {"preemption", t.total_preemption()},
            {"devolution", t.total_devolution()},
            {"blocking", t.total_blocking()},
            {"unbroken", t.total_unbroken()},
            {"active_at_end", r.active_at_end},
            {"retained_per_repetition", r.cases.retained_per_repetition},
            {"timeline", timeline}};
}

int cmd_run(const std::string& config, const std::string& batch, const std::string& out,
            const std::string& cases_out, std::optional<std::uint64_t> seed, const std::string& format) {
    std::vector<RunJob> jobs;
    if (!batch.empty()) {
        if (!config.empty() || !out.empty() || !cases_out.empty())
            throw ConfigError("--batch cannot be combined with --config, --out or --cases-out");
        jobs = load_manifest(batch);
        if (seed)
            for (auto& j : jobs) j.seed = seed;
    } else {
        jobs.push_back({config, out, cases_out, seed});
    }

    const auto results = execute_parallel(jobs);
    int code = kExitOk;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        if (r.code != kExitOk) {
            std::cerr << "error: " << r.error << '\n';
            code = std::max(code, r.code);
            continue;
        }
        if (format == "machine") {
            if (jobs.size() == 1 && jobs[i].out.empty())
                write_report(r.report, std::cout);
            else
                std::cout << run_digest(r.report).dump() << '\n';
        } else {
            std::cout << format_run_human(r.report);
            if (!jobs[i].out.empty()) std::cout << "  report written to " << jobs[i].out << '\n';
        }
    }
    return code;
}

int cmd_compare(const std::vector<std::string>& paths, bool by_repetition, const std::string& out,
                const std::string& format) {
    std::vector<SimulationReport> reports;
    for (const auto& p : paths) reports.push_back(read_report_file(p));
    const ComparisonReport cmp = compare_reports(reports, by_repetition);
    const std::string machine = comparison_to_json(cmp).dump(2) + "\n";
    const std::string human = format_comparison_human(cmp);
    if (!out.empty()) {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + out);
        f << (format == "human" ? human : machine);
    }
    std::cout << (format == "machine" ? machine : human);
    return kExitOk;
}

int cmd_cases(const std::string& path, const std::string& status, const std::string& model,
              const std::string& format) {
    CaseFilter filter;
    if (!status.empty()) filter.status = parse_case_status(status);
    if (!model.empty()) filter.model = parse_model(model);
    const CaseLoad load = read_cases_file(path);
    for (const auto& w : load.warnings) std::cerr << "warning: " << path << ": skipped " << w << '\n';
    std::vector<Case> shown;
    for (const auto& c : load.cases)
        if (filter.matches(c)) shown.push_back(c);
    if (format == "machine") {
        for (const auto& c : shown) std::cout << emit_case(c) << '\n';
    } else {
        std::cout << format_cases_human(shown);
        std::cout << shown.size() << " case(s)";
        if (load.skipped) std::cout << ", " << load.skipped << " corrupt line(s) skipped";
        std::cout << '\n';
    }
    return load.skipped ? kExitIo : kExitOk;
}

int cmd_validate(const std::string& config, const std::string& format) {
    const ScenarioConfig cfg = load_scenario(config);
    validate_scenario(cfg);
    if (format == "machine")
        std::cout << scenario_to_json(cfg).dump(2) << '\n';
    else
        std::cout << config << ": ok  schedule " << schedule_hash(cfg) << "  config " << config_hash(cfg) << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bandwidth allocation models under case-based cognitive management"};
    app.require_subcommand(1);

    std::string format = "human";
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", format, "Output style")->check(CLI::IsMember({"human", "machine"}));
    };

    std::string config, batch, out, cases_out;
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "Simulate a scenario and write its report");
    run->add_option("--config", config, "Scenario file (default scenario when omitted)");
    run->add_option("--batch", batch, "Manifest {\"runs\": [{\"config\", \"out\", \"cases_out\", \"seed\"}]}");
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--out", out, "Report file (JSON Lines)");
    run->add_option("--cases-out", cases_out, "Write the final case bases here");
    add_format(run);

    std::vector<std::string> reports;
    bool by_repetition = false;
    auto* compare = app.add_subcommand("compare", "Tabulate reports run on the same schedule");
    compare->add_option("reports", reports, "Report files")->required();
    compare->add_flag("--by-repetition", by_repetition, "One row per repetition of each report");
    compare->add_option("--out", out, "Also write the table here");
    add_format(compare);

    std::string base, status, model;
    auto* cases = app.add_subcommand("cases", "List a stored case base");
    cases->add_option("base", base, "Case file")->required();
    cases->add_option("--status", status, "Pending, Positive or Negative");
    cases->add_option("--model", model, "MAM, RDM or ATCS");
    add_format(cases);

    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("--config", config, "Scenario file")->required();
    add_format(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(config, batch, out, cases_out, seed, format);
        if (*compare) return cmd_compare(reports, by_repetition, out, format);
        if (*cases) return cmd_cases(base, status, model, format);
        if (*validate) return cmd_validate(config, format);
    } catch (const ConfigError& e) {
        std::cerr << "config error:";
        for (const auto& issue : e.issues()) std::cerr << "\n  " << issue;
        std::cerr << '\n';
        return kExitConfig;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ComparabilityError& e) {
        std::cerr << "not comparable: " << e.what() << '\n';
        return kExitComparability;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}
