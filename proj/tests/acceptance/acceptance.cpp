// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include "bamcbr/policy.hpp"
#include "bamcbr/scenario.hpp"
#include "bamcbr/simulation.hpp"

#include "../support/admission_oracle.hpp"
#include "../support/policy_fixtures.hpp"
#include "../support/properties.hpp"

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace bamcbr;

namespace {

constexpr std::uint64_t kFirstSeed = 1;
constexpr std::uint64_t kSeeds = 5;
constexpr std::uint64_t kOracleInstances = 10000;
constexpr int kPropertyInputs = 1000;

int failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail) {
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what << " -- " << detail << '\n';
}

struct SeedRuns {
    std::uint64_t seed;
    SimulationReport mam, rdm, atcs, bamcbr;
};

std::vector<SeedRuns> run_all() {
    std::vector<SeedRuns> out;
    for (std::uint64_t s = kFirstSeed; s < kFirstSeed + kSeeds; ++s) {
        auto base = default_scenario();
        base.seed = s;
        out.push_back({s, run_scenario(with_static_model(base, Model::MAM)),
                       run_scenario(with_static_model(base, Model::RDM)),
                       run_scenario(with_static_model(base, Model::ATCS)), run_scenario(base)});
    }
    return out;
}

std::int64_t preemption_in_pattern(const SimulationReport& rep, const std::string& pattern) {
    std::int64_t n = 0;
    for (const auto& w : rep.windows)
        if (w.pattern == pattern) n += w.counters.total_preemption();
    return n;
}

std::string property_detail(const std::string& name, const props::Result& r) {
    std::ostringstream s;
    s << name << ' ' << r.inputs << " inputs";
    if (!r.ok()) s << ", " << r.failures << " failures (" << r.first_failure << ')';
    return s.str();
}

} // namespace

int main() {
    const auto runs = run_all();
    const std::string first_pattern = default_scenario().patterns.front().name;

    {
        bool ok = true;
        std::ostringstream d;
        for (const auto& r : runs) {
            const auto p = r.mam.totals.total_preemption(), v = r.mam.totals.total_devolution();
            ok = ok && p == 0 && v == 0;
            d << "seed " << r.seed << " p=" << p << " d=" << v << "; ";
        }
        report(1, ok, "static MAM never preempts or devolves", d.str());
    }
    {
        bool ok = true;
        std::ostringstream d;
        for (const auto& r : runs) {
            const auto v = r.rdm.totals.total_devolution();
            const auto p1 = preemption_in_pattern(r.rdm, first_pattern);
            ok = ok && v == 0 && p1 > 0;
            d << "seed " << r.seed << " d=" << v << " p(pattern " << first_pattern << ")=" << p1 << "; ";
        }
        report(2, ok, "static RDM devolves nothing and preempts under pattern 1", d.str());
    }
    {
        bool ok = true;
        std::ostringstream d;
        for (const auto& r : runs) {
            const auto& m = r.mam.totals;
            const auto& rd = r.rdm.totals;
            const auto& a = r.atcs.totals;
            const bool s = m.total_blocking() > rd.total_blocking() && rd.total_blocking() > a.total_blocking() &&
                           a.total_unbroken() > rd.total_unbroken() && rd.total_unbroken() > m.total_unbroken();
            ok = ok && s;
            d << "seed " << r.seed << " blocking " << m.total_blocking() << '>' << rd.total_blocking() << '>'
              << a.total_blocking() << " unbroken " << a.total_unbroken() << '>' << rd.total_unbroken() << '>'
              << m.total_unbroken() << (s ? "" : " (violated)") << "; ";
        }
        report(3, ok, "blocking MAM > RDM > ATCS and unbroken ATCS > RDM > MAM per seed", d.str());
    }
    {
        bool ok = true;
        std::ostringstream d;
        for (const auto& r : runs) {
            const auto cog = r.bamcbr.victimized();
            const auto floor = std::min(r.rdm.victimized(), r.atcs.victimized());
            const bool s = cog < floor && r.bamcbr.totals.total_unbroken() > r.rdm.totals.total_unbroken();
            ok = ok && s;
            d << "seed " << r.seed << " p+d " << cog << '<' << floor << " unbroken "
              << r.bamcbr.totals.total_unbroken() << '>' << r.rdm.totals.total_unbroken() << (s ? "" : " (violated)")
              << "; ";
        }
        report(4, ok, "BAMCBR victimizes less than RDM and ATCS and completes more than RDM", d.str());
    }
    {
        bool ok = true;
        std::ostringstream d;
        for (const auto& r : runs) {
            const auto reps = split_by_repetition(r.bamcbr);
            bool s = reps.size() == 4 && reps[3].retained == 0 &&
                     reps[2].timeline.size() == reps[3].timeline.size();
            if (s)
                for (std::size_t i = 0; i < reps[2].timeline.size(); ++i)
                    s = s && reps[2].timeline[i].offset == reps[3].timeline[i].offset &&
                        reps[2].timeline[i].model == reps[3].timeline[i].model;
            ok = ok && s;
            d << "seed " << r.seed << " retained";
            for (const auto& rep : reps) d << ' ' << rep.retained;
            d << (s ? "" : " (timeline or retention differs)") << "; ";
        }
        report(5, ok, "4th repetition retains nothing and replays the 3rd repetition's timeline", d.str());
    }
    {
        std::int64_t mismatches = 0, admissions = 0;
        std::string first;
        for (std::uint64_t i = 0; i < kOracleInstances; ++i) {
            const auto r = oracle::run_instance(derive_seed(606, i));
            admissions += r.admissions;
            mismatches += r.mismatches;
            if (first.empty() && r.mismatches) first = r.first_mismatch;
        }
        std::ostringstream d;
        d << kOracleInstances << " instances, " << admissions << " admissions, " << mismatches << " mismatches";
        if (!first.empty()) d << " (" << first << ')';
        report(6, mismatches == 0, "admission matches the brute-force oracle", d.str());
    }
    {
        const std::vector<std::pair<std::string, props::Result>> suites{
            {"capacity+ledger", props::capacity_and_ledger(kPropertyInputs)},
            {"conservation", props::conservation(kPropertyInputs)},
            {"similarity", props::similarity_laws(kPropertyInputs)},
            {"negative-exclusion", props::negative_exclusion(kPropertyInputs)},
            {"determinism", props::determinism(kPropertyInputs)},
        };
        bool ok = true;
        std::string d;
        for (const auto& [name, r] : suites) {
            ok = ok && r.ok() && r.inputs >= kPropertyInputs;
            d += property_detail(name, r) + "; ";
        }
        report(7, ok, "invariant property suites", d);
    }
    {
        const auto rules = default_policy_set();
        int passed = 0, total = 0;
        std::string bad;
        for (const auto& f : fixtures::policy_fixtures()) {
            ++total;
            const auto got = evaluate_policies(f.measurements(), f.contextual(), rules);
            const bool s = f.symptom ? got && got->tag == *f.symptom && got->suggestion == f.suggestion : !got;
            passed += s;
            if (!s && bad.empty()) bad = f.name;
        }
        report(8, passed == total && total == 10, "policy rules fire on breaches and stay silent on compliant twins",
               std::to_string(passed) + "/" + std::to_string(total) + " fixtures" + (bad.empty() ? "" : ", first: " + bad));
    }

    return failures;
}
