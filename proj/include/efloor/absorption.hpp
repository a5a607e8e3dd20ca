#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "efloor/tanner.hpp"
#include "efloor/topology.hpp"

namespace efloor {

struct AbsorptionSet {
    std::vector<int> vars;  // sorted ascending
    int a = 0;
    int b = 0;                      // count of odd-connected checks
    std::vector<int> deg_profile;   // Deg per member, aligned with vars
    std::vector<int> unsat_checks;  // odd-connected checks, sorted
    std::vector<std::pair<int, int>> sat_checks;  // (check, even multiplicity), sorted
};

struct AbsorptionVerdict {
    bool is_absorption = false;
    std::vector<int> deg;  // aligned with the sorted input vars, filled either way
};

// Every neighbouring check touched at least twice.
bool is_stopping_set(const TannerGraph& g, const std::vector<int>& vars);

// Strict majority of each member's checks touched an even number of times.
AbsorptionVerdict is_absorption_set(const TannerGraph& g, const std::vector<int>& vars);

// Full connection profile of an arbitrary variable subset; does not require
// the set to pass the absorption predicate.
AbsorptionSet analyze_set(const TannerGraph& g, const std::vector<int>& vars);

struct Classification {
    int a = 0;
    int b = 0;
    std::vector<int> deg_profile;     // sorted descending
    std::pair<int, int> avg_emd;      // b/a in lowest terms
    int quad_checks = 0;              // satisfied checks of multiplicity 4
    std::string label;                // e.g. "deg=[5 5 5 5 5 5 5 5] quads=0"
};
Classification classify(const AbsorptionSet& s);

struct CatalogEntry {
    AbsorptionSet set;
    std::string class_label;
    std::string origin;  // discovery metadata, e.g. "brute-force"
};

struct SetCatalog {
    std::vector<CatalogEntry> entries;

    // False and no-op when an identical variable set is already present.
    bool add(AbsorptionSet s, std::string origin);
    // Orders entries by variable tuple; producers call this before returning.
    void finalize();

    std::map<std::pair<int, int>, long long> multiplicities() const;
    // Per-variable membership counts over one (a,b) family.
    std::map<int, long long> participation(int a, int b) const;

  private:
    std::set<std::vector<int>> index_;  // variable tuples already stored
};

// Serial reference enumerator: tests every subset of size 1..max_a. Refuses
// when the subset count exceeds work_bound.
SetCatalog brute_force_enumerate(const TannerGraph& g, int max_a,
                                 long long work_bound = 100000000LL);

// Depth-first embedding of a hidden-check topology: every topo edge becomes
// a distinct shared check, every quad group one check touching all four
// members. Returned sets pass is_absorption_set and induce exactly the given
// even-connection structure (verified by certificate). Requires a 4-cycle
// free graph. Parallel over embedding roots; workers = 0 uses all cores;
// results independent of worker count.
std::vector<AbsorptionSet> topology_guided_search(const TannerGraph& g,
                                                  const TopologyRealization& topo,
                                                  int workers = 0);

struct ReductionDecision {
    bool is_absorption = false;
    int a = 0;
    int b = 0;
    AbsorptionSet residual;
};
// Verdict on vars minus remove; remove must be a proper subset.
ReductionDecision reduction_check(const TannerGraph& g, const AbsorptionSet& s,
                                  const std::vector<int>& remove);

struct ContainmentCounts {
    long long total_small = 0;
    long long contained = 0;       // small sets that are proper subsets of a large set
    long long free_standing = 0;
};
ContainmentCounts containment_analysis(const SetCatalog& cat, std::pair<int, int> small_family,
                                       std::pair<int, int> large_family);

// Array of {"vars","a","b","deg_profile","unsat_checks"}; sat_checks are
// recomputable from the graph and not serialized.
std::string catalog_to_json(const SetCatalog& cat);
SetCatalog catalog_from_json(const std::string& text);
// Columns (a, b, class, multiplicity), one row per class.
std::string catalog_csv_summary(const SetCatalog& cat);

}  // namespace efloor
