#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bamcbr/bam.hpp"
#include "bamcbr/errors.hpp"
#include "bamcbr/measurements.hpp"

#include "../support/admission_oracle.hpp"
#include "../support/properties.hpp"

using namespace bamcbr;

namespace {

std::vector<TrafficClassConfig> reference_classes() {
    return {{0, 0, 400, "TC0"}, {1, 1, 350, "TC1"}, {2, 2, 250, "TC2"}};
}

LinkState reference_link(Model m) {
    auto link = make_link(1000, reference_classes(), m);
    link.audit = true;
    return link;
}

LspId admit_ok(LinkState& link, int cls, Mbps bw) {
    const auto d = admit_lsp(link, {cls, bw, 0.0, 1.0});
    REQUIRE(d.accepted());
    return *d.lsp_id;
}

} // namespace

TEST_CASE("preset matrices") {
    const auto classes = reference_classes();
    const auto mam = make_model_matrix(Model::MAM, classes);
    const auto rdm = make_model_matrix(Model::RDM, classes);
    const auto atcs = make_model_matrix(Model::ATCS, classes);
    for (int b = 0; b < 3; ++b) {
        for (int l = 0; l < 3; ++l) {
            CHECK(mam.allows(b, l) == (b == l));
            CHECK(atcs.allows(b, l));
        }
    }
    CHECK(rdm.allows(0, 1));
    CHECK(rdm.allows(0, 2));
    CHECK(rdm.allows(1, 2));
    CHECK_FALSE(rdm.allows(2, 0));
    CHECK_FALSE(rdm.allows(2, 1));
    CHECK_FALSE(rdm.allows(1, 0));
    CHECK_THROWS_AS(make_model_matrix(Model::Custom, classes), ConfigError);
}

TEST_CASE("class configuration issues") {
    auto classes = reference_classes();
    CHECK(class_config_issues(classes, 1000).empty());
    CHECK_FALSE(class_config_issues(classes, 900).empty());
    classes[1].bc = 0;
    CHECK_FALSE(class_config_issues(classes, 650).empty());
    classes = reference_classes();
    classes[2].priority = 0;
    CHECK_FALSE(class_config_issues(classes, 1000).empty());
    CHECK_THROWS_AS(make_link(900, reference_classes(), Model::MAM), ConfigError);
}

TEST_CASE("MAM blocks beyond its own BC") {
    auto link = reference_link(Model::MAM);
    admit_ok(link, 0, 390);
    const auto d = admit_lsp(link, {0, 20, 0.0, 1.0});
    CHECK_FALSE(d.accepted());
    CHECK(d.victims.empty());
    CHECK(d.breakdown.empty());
    CHECK(link.counters.blocking[0] == 1);
    CHECK(link.used_per_lender == std::vector<Mbps>{390, 0, 0});
}

TEST_CASE("RDM lends higher-priority spare to TC0") {
    auto link = reference_link(Model::RDM);
    admit_ok(link, 0, 400);
    admit_ok(link, 2, 150);
    const auto d = admit_lsp(link, {0, 10, 0.0, 1.0});
    REQUIRE(d.accepted());
    // TC1 is the closest permitted lender and has spare, so it lends first.
    CHECK(d.breakdown == std::vector<Mbps>{0, 10, 0});
}

TEST_CASE("RDM with only TC2 spare borrows from TC2") {
    auto link = reference_link(Model::RDM);
    admit_ok(link, 0, 400);
    admit_ok(link, 1, 350);
    admit_ok(link, 2, 150);
    const auto d = admit_lsp(link, {0, 10, 0.0, 1.0});
    REQUIRE(d.accepted());
    CHECK(d.breakdown == std::vector<Mbps>{0, 0, 10});
}

TEST_CASE("ATCS lends low-priority spare upward, RDM does not") {
    for (Model m : {Model::ATCS, Model::RDM}) {
        auto link = reference_link(m);
        admit_ok(link, 2, 250);
        admit_ok(link, 1, 350);
        admit_ok(link, 0, 350);
        const auto d = admit_lsp(link, {2, 30, 0.0, 1.0});
        if (m == Model::ATCS) {
            REQUIRE(d.accepted());
            CHECK(d.breakdown == std::vector<Mbps>{30, 0, 0});
        } else {
            CHECK_FALSE(d.accepted());
        }
    }
}

TEST_CASE("RDM reclaim preempts TC0 borrowers newest first") {
    auto link = reference_link(Model::RDM);
    admit_ok(link, 0, 400);
    admit_ok(link, 1, 350);
    admit_ok(link, 2, 160);
    std::vector<LspId> loans;
    for (int i = 0; i < 3; ++i) loans.push_back(admit_ok(link, 0, 25));
    // BC2 holds 160 own + 75 loaned, spare 15. An 80M TC2 request needs 65 back.
    const auto d = admit_lsp(link, {2, 80, 0.0, 1.0});
    REQUIRE(d.accepted());
    REQUIRE(d.victims.size() == 3);
    CHECK(d.victims[0].id == loans[2]);
    CHECK(d.victims[1].id == loans[1]);
    CHECK(d.victims[2].id == loans[0]);
    for (const auto& v : d.victims) CHECK(v.kind == VictimKind::Preempted);
    CHECK(link.counters.preemption[0] == 3);
    CHECK(d.breakdown == std::vector<Mbps>{0, 0, 80});
    CHECK(link.used_per_lender[2] == 240);
}

TEST_CASE("RDM reclaim with own spare 30 and 60 loaned to TC0") {
    auto link = reference_link(Model::RDM);
    admit_ok(link, 0, 400);
    admit_ok(link, 1, 350);
    admit_ok(link, 2, 160);
    const LspId a = admit_ok(link, 0, 25);
    const LspId b = admit_ok(link, 0, 25);
    const LspId c = admit_ok(link, 0, 10);
    REQUIRE(link.spare(2) == 30);
    const auto d = admit_lsp(link, {2, 80, 0.0, 1.0});
    REQUIRE(d.accepted());
    // 30 spare, then c (10), b (25), a (25): 40, 65, 90.
    REQUIRE(d.victims.size() == 3);
    CHECK(d.victims[0].id == c);
    CHECK(d.victims[1].id == b);
    CHECK(d.victims[2].id == a);
    int tc0_victims = 0;
    for (const auto& v : d.victims) tc0_victims += v.class_index == 0;
    CHECK(tc0_victims >= 2);
}

TEST_CASE("oversized request is blocked without throwing") {
    auto link = reference_link(Model::ATCS);
    const auto d = admit_lsp(link, {0, 1001, 0.0, 1.0});
    CHECK_FALSE(d.accepted());
    CHECK(link.counters.blocking[0] == 1);
    CHECK_THROWS_AS(admit_lsp(link, {0, 0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(admit_lsp(link, {5, 10, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("release returns bandwidth and counts only completions") {
    auto link = reference_link(Model::MAM);
    const LspId id = admit_ok(link, 1, 100);
    release_lsp(link, id, true);
    CHECK(link.used_per_lender == std::vector<Mbps>{0, 0, 0});
    CHECK(link.counters.unbroken[1] == 1);

    const LspId other = admit_ok(link, 1, 100);
    release_lsp(link, other, false);
    CHECK(link.counters.unbroken[1] == 1);

    const auto events = link.events.size();
    release_lsp(link, 4242, true);
    CHECK(link.events.size() == events + 1);
    CHECK(link.events.back().kind == LinkEventKind::Warning);
}

TEST_CASE("reconfiguration grandfathers loans and devolution reclaims them") {
    auto link = reference_link(Model::ATCS);
    admit_ok(link, 1, 350);
    admit_ok(link, 2, 250);
    const LspId loan = admit_ok(link, 2, 30);
    CHECK(link.used_per_lender == std::vector<Mbps>{30, 350, 250});

    reconfigure_model(link, Model::MAM);
    CHECK(link.active_model == Model::MAM);
    CHECK(link.active_lsps.contains(loan));
    CHECK(link.used_per_lender[0] == 30);

    admit_ok(link, 0, 370);
    const auto d = admit_lsp(link, {0, 20, 0.0, 1.0});
    REQUIRE(d.accepted());
    REQUIRE(d.victims.size() == 1);
    CHECK(d.victims[0].id == loan);
    CHECK(d.victims[0].kind == VictimKind::Devolved);
    CHECK(link.counters.devolution[2] == 1);
    CHECK(link.counters.preemption[2] == 0);
}

TEST_CASE("reconfiguring to the active model changes nothing but the event log") {
    auto link = reference_link(Model::RDM);
    admit_ok(link, 0, 100);
    auto before = link;
    reconfigure_model(link, Model::RDM);
    CHECK(link.matrix == before.matrix);
    CHECK(link.active_lsps == before.active_lsps);
    CHECK(link.used_per_lender == before.used_per_lender);
    CHECK(link.events.size() == before.events.size() + 1);
    CHECK(link.events.back().kind == LinkEventKind::Reconfigure);
}

TEST_CASE("MAM to ATCS on an empty link admits an over-BC request by loan") {
    auto link = reference_link(Model::MAM);
    reconfigure_model(link, Model::ATCS);
    const auto d = admit_lsp(link, {2, 300, 0.0, 1.0});
    REQUIRE(d.accepted());
    CHECK(d.breakdown[2] == 250);
    CHECK(d.breakdown[1] == 50);
}

TEST_CASE("snapshot measurements") {
    auto link = reference_link(Model::MAM);
    auto empty = snapshot_measurements(link, link.counters);
    CHECK(empty.utilization == 0.0);
    CHECK(empty.preemption == 0);
    admit_ok(link, 0, 400);
    const auto m = snapshot_measurements(link, link.counters);
    CHECK(m.utilization == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(m.class_utilization[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.class_utilization[1] == 0.0);
}

TEST_CASE("verify_ledger detects corruption") {
    auto link = reference_link(Model::MAM);
    admit_ok(link, 0, 100);
    CHECK_NOTHROW(verify_ledger(link));
    link.used_per_lender[0] += 1;
    CHECK_THROWS_AS(verify_ledger(link), InvariantError);
}

TEST_CASE("monotone permissiveness on pure-spare admissions") {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        Rng rng(seed);
        std::vector<LspRequest> reqs;
        for (int i = 0; i < 40; ++i)
            reqs.push_back({static_cast<int>(uniform_index(rng, 3)), static_cast<Mbps>(10 + uniform_index(rng, 60)),
                            0.0, 1.0});
        auto accepted_without_victims = [&](Model m) {
            auto link = reference_link(m);
            std::vector<bool> ok;
            for (const auto& r : reqs) {
                const auto d = admit_lsp(link, r);
                ok.push_back(d.accepted() && d.victims.empty());
            }
            return ok;
        };
        const auto mam = accepted_without_victims(Model::MAM);
        const auto rdm = accepted_without_victims(Model::RDM);
        const auto atcs = accepted_without_victims(Model::ATCS);
        // Only meaningful while the three links still hold the same LSPs.
        for (std::size_t i = 0; i < reqs.size(); ++i) {
            if (mam[i]) CHECK(rdm[i]);
            if (rdm[i]) CHECK(atcs[i]);
            if (mam[i] != rdm[i] || rdm[i] != atcs[i]) break;
        }
    }
}

TEST_CASE("admission matches the brute-force oracle on 2000 micro-instances") {
    int admissions = 0;
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const auto r = oracle::run_instance(derive_seed(77, i));
        admissions += r.admissions;
        INFO(r.first_mismatch);
        REQUIRE(r.mismatches == 0);
    }
    CHECK(admissions > 2000);
}

TEST_CASE("capacity and ledger invariants under random admissions") {
    const auto r = props::capacity_and_ledger(300);
    INFO(r.first_failure);
    CHECK(r.ok());
}
