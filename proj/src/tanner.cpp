#include "efloor/tanner.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace efloor {

namespace {

// Data errors (malformed alist text) are runtime errors; caller errors
// (bad programmatic arguments) are invalid_argument.
[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

[[noreturn]] void fail_arg(const std::string& msg) { throw std::invalid_argument(msg); }

[[noreturn]] void fail_line(int line, const std::string& msg) {
    fail("alist line " + std::to_string(line) + ": " + msg);
}

void finalize(TannerGraph& g) {
    int max_dv = 0, max_dc = 0;
    bool reg_v = true, reg_c = true;
    for (auto& a : g.var_adj) {
        std::sort(a.begin(), a.end());
        if (std::adjacent_find(a.begin(), a.end()) != a.end())
            fail_arg("duplicate variable/check incidence");
        max_dv = std::max(max_dv, static_cast<int>(a.size()));
        reg_v = reg_v && static_cast<int>(a.size()) == static_cast<int>(g.var_adj[0].size());
    }
    for (auto& a : g.chk_adj) {
        std::sort(a.begin(), a.end());
        max_dc = std::max(max_dc, static_cast<int>(a.size()));
        reg_c = reg_c && static_cast<int>(a.size()) == static_cast<int>(g.chk_adj[0].size());
    }
    g.d_v = max_dv;
    g.d_c = max_dc;
    g.regular = reg_v && reg_c && g.n_vars > 0 && g.n_checks > 0;
}

}  // namespace

std::size_t TannerGraph::edge_count() const {
    std::size_t e = 0;
    for (const auto& a : var_adj) e += a.size();
    return e;
}

int TannerGraph::shared_check(int u, int v) const {
    const auto& a = var_adj[u];
    const auto& b = var_adj[v];
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return a[i];
        if (a[i] < b[j]) ++i; else ++j;
    }
    return -1;
}

TannerGraph make_graph(int n_vars, int n_checks,
                       const std::vector<std::pair<int, int>>& edges) {
    if (n_vars < 0 || n_checks < 0) fail_arg("negative graph dimensions");
    TannerGraph g;
    g.n_vars = n_vars;
    g.n_checks = n_checks;
    g.var_adj.resize(n_vars);
    g.chk_adj.resize(n_checks);
    for (auto [v, c] : edges) {
        if (v < 0 || v >= n_vars) fail_arg("edge variable index out of range");
        if (c < 0 || c >= n_checks) fail_arg("edge check index out of range");
        g.var_adj[v].push_back(c);
        g.chk_adj[c].push_back(v);
    }
    finalize(g);
    return g;
}

namespace {

// Reads one whitespace-separated token line as integers; counts lines for
// error reporting. alist files pad with spaces, so empty lines are errors
// only where a row is expected.
struct LineReader {
    std::istream& in;
    int line_no = 0;

    std::vector<long> next_ints(const char* what) {
        std::string s;
        while (std::getline(in, s)) {
            ++line_no;
            // tolerate \r\n
            if (!s.empty() && s.back() == '\r') s.pop_back();
            bool blank = s.find_first_not_of(" \t") == std::string::npos;
            if (blank) continue;
            std::istringstream row(s);
            std::vector<long> out;
            long x;
            while (row >> x) out.push_back(x);
            if (!row.eof()) fail_line(line_no, std::string("non-integer token in ") + what);
            return out;
        }
        fail("alist: unexpected end of file while reading " + std::string(what));
    }
};

}  // namespace

TannerGraph parse_alist(std::istream& in) {
    LineReader r{in};

    auto hdr = r.next_ints("header");
    if (hdr.size() != 2) fail_line(r.line_no, "expected 'n m'");
    long n = hdr[0], m = hdr[1];
    if (n <= 0 || m <= 0 || n > 100000000 || m > 100000000)
        fail_line(r.line_no, "dimensions out of range");

    auto mx = r.next_ints("max degrees");
    if (mx.size() != 2) fail_line(r.line_no, "expected 'max_dv max_dc'");
    long max_dv = mx[0], max_dc = mx[1];
    if (max_dv <= 0 || max_dc <= 0) fail_line(r.line_no, "max degrees must be positive");

    auto vdeg = r.next_ints("variable degree list");
    if (static_cast<long>(vdeg.size()) != n)
        fail_line(r.line_no, "variable degree list has wrong length");
    auto cdeg = r.next_ints("check degree list");
    if (static_cast<long>(cdeg.size()) != m)
        fail_line(r.line_no, "check degree list has wrong length");

    TannerGraph g;
    g.n_vars = static_cast<int>(n);
    g.n_checks = static_cast<int>(m);
    g.var_adj.resize(n);
    g.chk_adj.resize(m);

    for (long v = 0; v < n; ++v) {
        if (vdeg[v] < 0 || vdeg[v] > max_dv)
            fail("alist: variable degree out of range at entry " + std::to_string(v + 1));
        auto row = r.next_ints("variable adjacency row");
        if (static_cast<long>(row.size()) != max_dv && static_cast<long>(row.size()) != vdeg[v])
            fail_line(r.line_no, "variable row has wrong entry count");
        long seen = 0;
        for (long c1 : row) {
            if (c1 == 0) continue;  // zero padding
            if (c1 < 1 || c1 > m) fail_line(r.line_no, "check index out of range");
            g.var_adj[v].push_back(static_cast<int>(c1 - 1));
            ++seen;
        }
        if (seen != vdeg[v]) fail_line(r.line_no, "variable row does not match its degree");
    }
    for (long c = 0; c < m; ++c) {
        if (cdeg[c] < 0 || cdeg[c] > max_dc)
            fail("alist: check degree out of range at entry " + std::to_string(c + 1));
        auto row = r.next_ints("check adjacency row");
        if (static_cast<long>(row.size()) != max_dc && static_cast<long>(row.size()) != cdeg[c])
            fail_line(r.line_no, "check row has wrong entry count");
        long seen = 0;
        for (long v1 : row) {
            if (v1 == 0) continue;
            if (v1 < 1 || v1 > n) fail_line(r.line_no, "variable index out of range");
            g.chk_adj[c].push_back(static_cast<int>(v1 - 1));
            ++seen;
        }
        if (seen != cdeg[c]) fail_line(r.line_no, "check row does not match its degree");
    }

    // Consistency of the two adjacency halves.
    TannerGraph h;
    h.n_vars = g.n_vars;
    h.n_checks = g.n_checks;
    h.var_adj.resize(n);
    for (long c = 0; c < m; ++c)
        for (int v : g.chk_adj[c]) h.var_adj[v].push_back(static_cast<int>(c));
    for (auto& a : h.var_adj) std::sort(a.begin(), a.end());
    for (auto& a : g.var_adj) std::sort(a.begin(), a.end());
    if (h.var_adj != g.var_adj)
        fail("alist: variable and check adjacency sections disagree");
    for (const auto& a : g.var_adj)
        if (std::adjacent_find(a.begin(), a.end()) != a.end())
            fail("alist: repeated incidence in adjacency rows");

    finalize(g);
    return g;
}

TannerGraph parse_alist_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail("cannot open alist file: " + path);
    return parse_alist(f);
}

std::string serialize_alist(const TannerGraph& g) {
    std::ostringstream out;
    out << g.n_vars << " " << g.n_checks << "\n";
    out << g.d_v << " " << g.d_c << "\n";
    for (int v = 0; v < g.n_vars; ++v)
        out << g.var_degree(v) << (v + 1 == g.n_vars ? "\n" : " ");
    for (int c = 0; c < g.n_checks; ++c)
        out << g.chk_degree(c) << (c + 1 == g.n_checks ? "\n" : " ");
    for (int v = 0; v < g.n_vars; ++v) {
        for (int k = 0; k < g.d_v; ++k) {
            long x = k < g.var_degree(v) ? g.var_adj[v][k] + 1 : 0;
            out << x << (k + 1 == g.d_v ? "\n" : " ");
        }
    }
    for (int c = 0; c < g.n_checks; ++c) {
        for (int k = 0; k < g.d_c; ++k) {
            long x = k < g.chk_degree(c) ? g.chk_adj[c][k] + 1 : 0;
            out << x << (k + 1 == g.d_c ? "\n" : " ");
        }
    }
    return out.str();
}

TannerGraph expand_qc(const QcBlockSpec& spec) {
    if (spec.rows <= 0 || spec.cols <= 0 || spec.block_size <= 0)
        fail_arg("qc spec: dimensions must be positive");
    if (static_cast<int>(spec.perms.size()) != spec.rows)
        fail_arg("qc spec: wrong number of block rows");
    const int B = spec.block_size;
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(spec.rows) * spec.cols * B);
    for (int i = 0; i < spec.rows; ++i) {
        if (static_cast<int>(spec.perms[i].size()) != spec.cols)
            fail_arg("qc spec: wrong number of block columns in row " + std::to_string(i));
        for (int j = 0; j < spec.cols; ++j) {
            const auto& p = spec.perms[i][j];
            if (static_cast<int>(p.size()) != B)
                fail_arg("qc spec: permutation size mismatch at block " +
                     std::to_string(i) + "," + std::to_string(j));
            std::vector<char> hit(B, 0);
            for (int t = 0; t < B; ++t) {
                if (p[t] < 0 || p[t] >= B || hit[p[t]])
                    fail_arg("qc spec: block " + std::to_string(i) + "," +
                         std::to_string(j) + " is not a permutation");
                hit[p[t]] = 1;
                edges.emplace_back(j * B + t, i * B + p[t]);
            }
        }
    }
    return make_graph(spec.cols * B, spec.rows * B, edges);
}

bool is_four_cycle_free(const TannerGraph& g) {
    // A 4-cycle is a variable pair appearing together in two checks.
    std::unordered_set<unsigned long long> pairs;
    pairs.reserve(g.edge_count() * 4);
    for (const auto& vs : g.chk_adj) {
        for (std::size_t i = 0; i < vs.size(); ++i)
            for (std::size_t j = i + 1; j < vs.size(); ++j) {
                unsigned long long key =
                    (static_cast<unsigned long long>(vs[i]) << 32) |
                    static_cast<unsigned long long>(vs[j]);
                if (!pairs.insert(key).second) return false;
            }
    }
    return true;
}

}  // namespace efloor
