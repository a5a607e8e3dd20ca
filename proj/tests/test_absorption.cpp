#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "efloor/absorption.hpp"
#include "support.hpp"

using namespace efloor;
namespace ts = efloor::testsupport;

namespace {

// Test-local re-derivation of the connection profile straight from the
// adjacency lists, independent of analyze_set.
struct Profile {
    std::vector<int> deg;
    int b = 0;
    bool absorption = true;
};

Profile profile_of(const TannerGraph& g, const std::vector<int>& vars) {
    std::map<int, int> touches;
    for (int v : vars)
        for (int c : g.var_adj[v]) ++touches[c];
    Profile p;
    for (const auto& [c, t] : touches)
        if (t % 2) ++p.b;
    for (int v : vars) {
        int even = 0;
        for (int c : g.var_adj[v])
            if (touches[c] % 2 == 0) ++even;
        p.deg.push_back(even);
        if (2 * even <= g.var_degree(v)) p.absorption = false;
    }
    return p;
}

// Every absorption set of size <= max_a, found by raw subset iteration.
std::set<std::vector<int>> oracle_sets(const TannerGraph& g, int max_a) {
    std::set<std::vector<int>> found;
    std::vector<int> pick;
    auto rec = [&](auto&& self, int next, int left) -> void {
        if (!pick.empty() && profile_of(g, pick).absorption)
            found.insert(pick);
        if (left == 0) return;
        for (int v = next; v < g.n_vars; ++v) {
            pick.push_back(v);
            self(self, v + 1, left - 1);
            pick.pop_back();
        }
    };
    rec(rec, 0, max_a);
    return found;
}

std::set<std::vector<int>> catalog_tuples(const SetCatalog& cat) {
    std::set<std::vector<int>> out;
    for (const auto& e : cat.entries) out.insert(e.set.vars);
    return out;
}

}  // namespace

TEST_CASE("stopping and absorption predicates on a hand graph") {
    // v0,v1 share c0; c1 = {v0,v1,v2}; c2 = {v2}
    const TannerGraph g =
        make_graph(3, 3, {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 1}, {2, 2}});
    CHECK(is_stopping_set(g, {0, 1}));        // c0 and c1 both touched twice
    CHECK_FALSE(is_stopping_set(g, {0, 2}));  // c0 touched once
    CHECK(is_absorption_set(g, {0, 1}).is_absorption);
    CHECK_FALSE(is_absorption_set(g, {2}).is_absorption);
    const auto verdict = is_absorption_set(g, {0, 1});
    CHECK(verdict.deg == std::vector<int>{2, 2});

    CHECK_THROWS_AS(is_absorption_set(g, {}), std::invalid_argument);
    CHECK_THROWS_AS(is_absorption_set(g, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(is_absorption_set(g, {3}), std::invalid_argument);
}

TEST_CASE("analyze_set reports the full profile of the octet") {
    const TannerGraph g = ts::octet_host();
    const AbsorptionSet s = analyze_set(g, {0, 1, 2, 3, 4, 5, 6, 7});
    CHECK(s.a == 8);
    CHECK(s.b == 8);
    CHECK(s.deg_profile == std::vector<int>(8, 5));
    CHECK(s.unsat_checks.size() == 8);
    CHECK(s.sat_checks.size() == 20);
    for (const auto& [c, mult] : s.sat_checks) {
        CHECK(mult == 2);
        CHECK(c < 20);
    }
    for (int c : s.unsat_checks) CHECK(c >= 20);
}

TEST_CASE("classify condenses a profile into a labelled class") {
    const TannerGraph g = ts::octet_host();
    const Classification c = classify(analyze_set(g, {0, 1, 2, 3, 4, 5, 6, 7}));
    CHECK(c.a == 8);
    CHECK(c.b == 8);
    CHECK(c.deg_profile == std::vector<int>(8, 5));
    CHECK(c.avg_emd == std::pair<int, int>{1, 1});
    CHECK(c.quad_checks == 0);
    CHECK(c.label.find("5 5 5 5 5 5 5 5") != std::string::npos);
}

TEST_CASE("catalog deduplicates and aggregates") {
    const TannerGraph g = ts::octet_host();
    SetCatalog cat;
    const AbsorptionSet s = analyze_set(g, {0, 1, 2, 3, 4, 5, 6, 7});
    CHECK(cat.add(s, "first"));
    CHECK_FALSE(cat.add(s, "again"));
    AbsorptionSet t = analyze_set(g, {0, 1, 2, 3, 4, 5, 6});
    CHECK(cat.add(t, "smaller"));
    cat.finalize();
    REQUIRE(cat.entries.size() == 2);
    CHECK(cat.entries[0].set.vars.size() == 7);  // tuple order
    const auto mult = cat.multiplicities();
    CHECK(mult.at({8, 8}) == 1);
    CHECK(mult.at({7, 12}) == 1);
    const auto part = cat.participation(8, 8);
    CHECK(part.at(0) == 1);
    CHECK(part.size() == 8);
}

TEST_CASE("brute force matches a raw subset oracle") {
    const TannerGraph g = ts::array_code(7);
    const SetCatalog cat = brute_force_enumerate(g, 4);
    CHECK(catalog_tuples(cat) == oracle_sets(g, 4));
    for (const auto& e : cat.entries) {
        const Profile p = profile_of(g, e.set.vars);
        CHECK(p.absorption);
        CHECK(p.b == e.set.b);
    }
}

TEST_CASE("brute force respects its work bound") {
    CHECK_THROWS_AS(brute_force_enumerate(ts::array_code(13), 5, 1000),
                    std::runtime_error);
    CHECK_THROWS_AS(brute_force_enumerate(ts::array_code(7), 0),
                    std::invalid_argument);
}

TEST_CASE("guided search equals brute force on an array code") {
    const TannerGraph g = ts::array_code(13);
    const SetCatalog brute = brute_force_enumerate(g, 4);

    SetCatalog guided;
    for (int a = 3; a <= 4; ++a)
        for (int beff = 0; beff <= a; ++beff)
            for (const auto& deg_seq : enumerate_classes(a, beff, 3))
                for (const auto& topo : enumerate_realizations(deg_seq, true))
                    for (AbsorptionSet& s : topology_guided_search(g, topo))
                        guided.add(std::move(s), "guided");
    guided.finalize();

    CHECK(catalog_tuples(guided) == catalog_tuples(brute));
    CHECK(guided.multiplicities() == brute.multiplicities());
}

TEST_CASE("guided search is independent of the worker count") {
    const TannerGraph g = ts::array_code(13);
    const auto topos = enumerate_realizations({2, 2, 2, 2}, true);
    for (const auto& topo : topos) {
        auto one = topology_guided_search(g, topo, 1);
        auto many = topology_guided_search(g, topo, 3);
        REQUIRE(one.size() == many.size());
        for (std::size_t i = 0; i < one.size(); ++i)
            CHECK(one[i].vars == many[i].vars);
    }
}

TEST_CASE("guided search locates a planted octet") {
    const ts::PlantedCode pc = ts::planted_code(13);
    REQUIRE(is_four_cycle_free(pc.g));
    const AbsorptionSet planted = analyze_set(pc.g, pc.members);
    CHECK(planted.a == 8);
    CHECK(planted.b == 8);

    bool found = false;
    for (const auto& topo :
         enumerate_realizations({5, 5, 5, 5, 5, 5, 5, 5}, true))
        for (const AbsorptionSet& s : topology_guided_search(pc.g, topo))
            if (s.vars == pc.members) found = true;
    CHECK(found);
}

TEST_CASE("guided search rejects malformed topologies") {
    const TannerGraph g = ts::array_code(7);
    TopologyRealization bad;
    bad.a = 3;
    bad.deg_seq = {2, 2, 2};
    bad.edges = {{0, 1}, {0, 1}, {1, 2}};
    CHECK_THROWS_AS(topology_guided_search(g, bad), std::invalid_argument);
}

TEST_CASE("reduction of the octet leaves a (7,12) absorption set") {
    const TannerGraph g = ts::octet_host();
    const AbsorptionSet s = analyze_set(g, {0, 1, 2, 3, 4, 5, 6, 7});
    const ReductionDecision d = reduction_check(g, s, {3});
    CHECK(d.is_absorption);
    CHECK(d.a == 7);
    CHECK(d.b == 12);
    CHECK(d.residual.vars == std::vector<int>{0, 1, 2, 4, 5, 6, 7});
    CHECK_THROWS_AS(reduction_check(g, s, {0, 1, 2, 3, 4, 5, 6, 7}),
                    std::invalid_argument);
    CHECK_THROWS_AS(reduction_check(g, s, {9}), std::invalid_argument);
}

TEST_CASE("containment analysis over the octet host") {
    const TannerGraph g = ts::octet_host();
    const SetCatalog cat = brute_force_enumerate(g, 8);
    const auto mult = cat.multiplicities();
    CHECK(mult.at({8, 8}) == 1);
    CHECK(mult.at({7, 12}) == 8);  // every 7-subset qualifies
    const ContainmentCounts cc = containment_analysis(cat, {7, 12}, {8, 8});
    CHECK(cc.total_small == 8);
    CHECK(cc.contained == 8);
    CHECK(cc.free_standing == 0);
}

TEST_CASE("catalog JSON and CSV round-trip") {
    const TannerGraph g = ts::array_code(7);
    const SetCatalog cat = brute_force_enumerate(g, 4);
    const SetCatalog back = catalog_from_json(catalog_to_json(cat));
    REQUIRE(back.entries.size() == cat.entries.size());
    for (std::size_t i = 0; i < cat.entries.size(); ++i) {
        CHECK(back.entries[i].set.vars == cat.entries[i].set.vars);
        CHECK(back.entries[i].set.a == cat.entries[i].set.a);
        CHECK(back.entries[i].set.b == cat.entries[i].set.b);
    }
    const std::string csv = catalog_csv_summary(cat);
    const std::size_t rows =
        std::count(csv.begin(), csv.end(), '\n');
    CHECK(rows == cat.multiplicities().size() + 1);  // header included
}
