#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bamcbr/case_store.hpp"
#include "bamcbr/errors.hpp"
#include "bamcbr/report.hpp"
#include "bamcbr/scenario.hpp"
#include "bamcbr/simulation.hpp"

#include <sstream>

using namespace bamcbr;

namespace {

ScenarioConfig small(Model m, bool cognitive) {
    auto cfg = desk_scenario();
    cfg.repetitions = 2;
    cfg = cognitive ? cfg : with_static_model(cfg, m);
    return cfg;
}

struct CognitiveRun {
    SimulationReport report;
    CaseBase positive;
    CaseBase negative;
};

CognitiveRun cognitive_run() {
    auto cfg = desk_scenario();
    Simulation sim(cfg);
    sim.run();
    return {sim.report(), sim.engine()->positive(), sim.engine()->negative()};
}

std::string replace_line(const std::string& text, std::size_t line, const std::string& with) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string l;
    for (std::size_t i = 1; std::getline(in, l); ++i) out << (i == line ? with : l) << '\n';
    return out.str();
}

} // namespace

TEST_CASE("report round trip") {
    SUBCASE("static with full events") {
        auto cfg = small(Model::RDM, false);
        cfg.events = EventDetail::Full;
        const auto rep = run_scenario(cfg);
        REQUIRE_FALSE(rep.events.empty());
        const auto text = emit_report(rep);
        CHECK(parse_report(text) == rep);
        CHECK(emit_report(parse_report(text)) == text);
    }
    SUBCASE("cognitive") {
        const auto rep = cognitive_run().report;
        REQUIRE_FALSE(rep.control.empty());
        CHECK(parse_report(emit_report(rep)) == rep);
    }
}

TEST_CASE("malformed reports raise FormatError") {
    const auto text = emit_report(run_scenario(small(Model::MAM, false)));
    CHECK_THROWS_AS(parse_report(""), FormatError);
    CHECK_THROWS_AS(parse_report(replace_line(text, 2, "{not json")), FormatError);
    CHECK_THROWS_AS(parse_report(replace_line(text, 1, R"({"record":"window"})")), FormatError);
    CHECK_THROWS_AS(parse_report(replace_line(text, 2, R"({"record":"mystery"})")), FormatError);

    // Drop the summary line.
    const auto cut = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
    CHECK_THROWS_AS(parse_report(cut), FormatError);

    try {
        (void)parse_report(replace_line(text, 3, "{"));
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("comparison across reports") {
    const auto mam = run_scenario(small(Model::MAM, false));
    const auto rdm = run_scenario(small(Model::RDM, false));
    const std::vector<SimulationReport> both{mam, rdm};
    const auto cmp = compare_reports(both);
    REQUIRE(cmp.rows.size() == 2);
    CHECK(cmp.rows[0].label == "MAM");
    CHECK(cmp.rows[1].label == "RDM");
    CHECK(cmp.rows[0].blocking == mam.totals.total_blocking());
    CHECK(cmp.rows[1].preemption == rdm.totals.total_preemption());
    CHECK(cmp.rows[1].unbroken == rdm.totals.total_unbroken());
    CHECK(cmp.schedule_hash == mam.schedule_hash);
    CHECK(comparison_from_json(comparison_to_json(cmp)) == cmp);
    const auto human = format_comparison_human(cmp);
    CHECK(human.find("RDM") != std::string::npos);

    const std::vector<SimulationReport> one{mam};
    CHECK_THROWS_AS(compare_reports(one), ComparabilityError);
    CHECK_THROWS_AS(compare_reports(std::span<const SimulationReport>{}), ComparabilityError);

    auto other = small(Model::ATCS, false);
    other.seed = 99;
    const std::vector<SimulationReport> mixed{mam, run_scenario(other)};
    CHECK_THROWS_AS(compare_reports(mixed), ComparabilityError);

    const auto split = compare_reports(one, true);
    REQUIRE(split.rows.size() == 2);
    CHECK(split.rows[0].label == "MAM 1/2");
    CHECK(split.rows[1].label == "MAM 2/2");
    CHECK(split.rows[0].blocking + split.rows[1].blocking == mam.totals.total_blocking());
}

TEST_CASE("case store round trip is exact") {
    const auto run = cognitive_run();
    REQUIRE_FALSE(run.positive.empty());
    std::stringstream buf;
    write_cases(run.positive, run.negative, buf);
    const auto first = buf.str();
    std::istringstream in(first);
    const auto load = read_cases(in);
    CHECK(load.skipped == 0);
    CHECK(load.warnings.empty());
    REQUIRE(load.cases.size() == run.positive.size() + run.negative.size());

    CaseBase pos(CaseStatus::Positive), neg(CaseStatus::Negative);
    for (const auto& c : load.cases) (c.status == CaseStatus::Positive ? pos : neg).insert(c);
    CHECK(pos == run.positive);
    CHECK(neg == run.negative);

    std::stringstream again;
    write_cases(pos, neg, again);
    CHECK(again.str() == first);

    for (const auto& c : run.positive.entries()) CHECK(parse_case(emit_case(c)) == c);
}

TEST_CASE("corrupt case lines are skipped and counted") {
    const auto run = cognitive_run();
    std::stringstream buf;
    write_cases(run.positive, run.negative, buf);
    auto text = buf.str();
    text += "{\"schema\":1,\"id\":\n";
    text += "not json at all\n";
    text += "\n";
    text += R"({"schema":99,"id":1})" "\n";
    std::istringstream in(text);
    const auto load = read_cases(in);
    CHECK(load.cases.size() == run.positive.size() + run.negative.size());
    CHECK(load.skipped == 3);
    CHECK(load.warnings.size() == 3);
    CHECK_THROWS_AS(parse_case("[]"), FormatError);
    CHECK_THROWS_AS(read_cases_file("/nonexistent/cases.jsonl"), FormatError);
}

TEST_CASE("case filters and empty bases") {
    std::istringstream empty("");
    const auto none = read_cases(empty);
    CHECK(none.cases.empty());
    CHECK(none.skipped == 0);
    CHECK(format_cases_human(none.cases).empty());

    const auto run = cognitive_run();
    std::vector<Case> all(run.positive.entries().begin(), run.positive.entries().end());
    all.insert(all.end(), run.negative.entries().begin(), run.negative.entries().end());
    for (Model m : {Model::MAM, Model::RDM, Model::ATCS}) {
        CaseFilter f{std::nullopt, m};
        for (const auto& c : all) CHECK(f.matches(c) == (c.solution == m));
    }
    CaseFilter negative{CaseStatus::Negative, std::nullopt};
    std::size_t n = 0;
    for (const auto& c : all) n += negative.matches(c);
    CHECK(n == run.negative.size());
    CHECK(CaseFilter{}.matches(all.front()));
}
