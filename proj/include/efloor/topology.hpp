#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace efloor {

// A hidden-check topology: the internal structure of a candidate (a,b) set
// with check nodes elided. Simple edges stand for checks touching the set
// exactly twice; quad groups for checks touching it four times. Members of
// a quad group carry no simple edge between them (that pair already shares
// the quad check, and a second shared check would be a 4-cycle).
struct TopologyRealization {
    int a = 0;                                  // vertex count
    int b = 0;                                  // odd-connected check budget
    std::vector<int> deg_seq;                   // per-vertex Deg, descending
    std::vector<std::pair<int, int>> edges;     // u < v
    std::vector<std::array<int, 4>> quad_checks;
    std::string certificate;                    // canonical form

    int degree(int v) const;
};

struct TopologyClass {
    int a = 0;
    int b = 0;
    std::vector<int> deg_seq;  // descending
    std::vector<TopologyRealization> realizations;
};

// All Deg multisets over {floor(d_v/2)+1 .. d_v} of size a summing to
// a*d_v - b, descending order, deterministic sequence. Requires
// 0 <= b <= (d_v - floor(d_v/2) - 1)*a; infeasible (a,b) raises.
std::vector<std::vector<int>> enumerate_classes(int a, int b, int d_v);

// All non-isomorphic realizations of a degree sequence: simple graphs, plus
// (when allow_quad) variants replacing four pairwise attachments with one or
// two quad checks (two quad groups share at most one vertex). Results carry
// certificates and are sorted by them. Node count capped at 12. Unrealizable
// sequences (odd sum, or a degree above node count - 1) yield an empty list.
std::vector<TopologyRealization> enumerate_realizations(
    const std::vector<int>& deg_seq, bool allow_quad = false,
    long long work_bound = 400000000LL);

// Canonical certificate of a vertex-labelled structure, exact for <= 16
// nodes: lexicographically minimal adjacency encoding over all permutations
// compatible with an iterated degree refinement. Quad groups participate as
// separately-coloured auxiliary vertices.
std::string canonical_form(int n, const std::vector<std::pair<int, int>>& edges,
                           const std::vector<std::array<int, 4>>& quad_checks = {});

// Residual class after deleting `removed` vertices from a realization:
// remaining pair checks keep their role, a quad check with 3 surviving
// members turns odd, with 2 it degenerates into a pair check, and every
// edge into a deleted vertex leaves a singly-connected check behind.
// valid == all residual Deg keep a strict majority of d_v.
struct ReductionOutcome {
    bool valid = false;
    int a = 0;
    int b = 0;
    std::vector<int> deg_seq;
};
ReductionOutcome reduce_realization(const TopologyRealization& r, int d_v,
                                    const std::vector<int>& removed);

// Prunes realizations for which deleting some vertex or vertex pair yields a
// valid absorption configuration whose (a,b) is known absent. Survivors are
// returned; pruned entries produce a machine-readable reason.
struct PruneReason {
    std::string certificate;           // pruned realization
    std::vector<int> removed;          // deleted vertices
    int residual_a = 0;
    int residual_b = 0;
};
struct ReductionClosureResult {
    std::vector<TopologyRealization> survivors;
    std::vector<PruneReason> pruned;
};
ReductionClosureResult reduction_closure(
    const std::vector<TopologyRealization>& realizations, int d_v,
    const std::vector<std::pair<int, int>>& known_absent);

// JSON array of {"a","deg_seq","b","edges","quad_checks"}; lossless
// round-trip via the matching parser.
std::string topologies_to_json(const std::vector<TopologyRealization>& v);
std::vector<TopologyRealization> topologies_from_json(const std::string& text);

}  // namespace efloor
