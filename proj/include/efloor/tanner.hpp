#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace efloor {

// Bipartite adjacency of a parity-check matrix. Immutable once constructed;
// const instances are safe to share across threads.
struct TannerGraph {
    int n_vars = 0;
    int n_checks = 0;
    std::vector<std::vector<int>> var_adj;  // per variable: sorted check ids
    std::vector<std::vector<int>> chk_adj;  // per check: sorted variable ids
    int d_v = 0;   // max variable degree (uniform degree when regular)
    int d_c = 0;   // max check degree
    bool regular = false;

    int var_degree(int v) const { return static_cast<int>(var_adj[v].size()); }
    int chk_degree(int c) const { return static_cast<int>(chk_adj[c].size()); }
    std::size_t edge_count() const;

    // First check shared by variables u and v, or -1. In a 4-cycle-free
    // graph a pair shares at most one check, so "first" is "the".
    int shared_check(int u, int v) const;
};

// Quasi-cyclic layout: rows x cols blocks of block_size x block_size
// permutation matrices. perms[i][j][t] is the check row (within block i)
// connected to variable column t of block j.
struct QcBlockSpec {
    int rows = 0;
    int cols = 0;
    int block_size = 0;
    std::vector<std::vector<std::vector<int>>> perms;  // [rows][cols][block_size]
};

// Builds a graph from an edge list, validating simplicity (no duplicate
// variable/check incidence) and index ranges.
TannerGraph make_graph(int n_vars, int n_checks,
                       const std::vector<std::pair<int, int>>& edges);

// alist interchange format:
//   line 1: n m
//   line 2: max_dv max_dc
//   line 3: n variable degrees        line 4: m check degrees
//   then n lines of 1-based check indices (zero-padded to max_dv),
//   then m lines of 1-based variable indices (zero-padded to max_dc).
// Indices are converted to 0-based internally. Irregular degree lists are
// accepted. Malformed input raises std::runtime_error naming the line.
TannerGraph parse_alist(std::istream& in);
TannerGraph parse_alist_file(const std::string& path);

// Inverse of parse_alist: canonical single-space separation, zero padding,
// trailing newline. parse(serialize(g)) == g and serialize is a fixed point
// on canonical input.
std::string serialize_alist(const TannerGraph& g);

// Expands a QC block spec: variable j*B+t joins check i*B+perms[i][j][t].
TannerGraph expand_qc(const QcBlockSpec& spec);

// True iff no two variables share two or more checks.
bool is_four_cycle_free(const TannerGraph& g);

}  // namespace efloor
