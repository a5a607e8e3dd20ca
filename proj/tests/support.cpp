#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace efloor::testsupport {

TannerGraph array_code(int p, int d_v, int d_c) {
    QcBlockSpec spec;
    spec.rows = d_v;
    spec.cols = d_c;
    spec.block_size = p;
    spec.perms.assign(
        d_v, std::vector<std::vector<int>>(d_c, std::vector<int>(p, 0)));
    for (int i = 0; i < d_v; ++i)
        for (int j = 0; j < d_c; ++j)
            for (int t = 0; t < p; ++t)
                spec.perms[i][j][t] = (t + i * j) % p;
    return expand_qc(spec);
}

TannerGraph random_regular_code(int n_vars, std::uint64_t seed) {
    const int d_v = 3, d_c = 6;
    if (n_vars % 2) throw std::invalid_argument("n_vars must be even");
    const int m = n_vars * d_v / d_c;
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 500; ++attempt) {
        std::vector<std::vector<int>> var_adj(n_vars), chk_adj(m);
        std::vector<int> chk_deg(m, 0);
        bool dead = false;
        for (int v = 0; v < n_vars && !dead; ++v) {
            for (int e = 0; e < d_v && !dead; ++e) {
                // checks already two steps away would close a 4-cycle
                std::vector<char> banned(m, 0);
                for (int c : var_adj[v]) {
                    banned[c] = 1;
                    for (int u : chk_adj[c])
                        for (int c2 : var_adj[u]) banned[c2] = 1;
                }
                std::vector<int> pool;
                int best = d_c;
                for (int c = 0; c < m; ++c) {
                    if (banned[c] || chk_deg[c] >= d_c) continue;
                    if (chk_deg[c] < best) {
                        best = chk_deg[c];
                        pool.clear();
                    }
                    if (chk_deg[c] == best) pool.push_back(c);
                }
                if (pool.empty()) {
                    dead = true;
                    break;
                }
                const int c =
                    pool[std::uniform_int_distribution<std::size_t>(
                        0, pool.size() - 1)(rng)];
                var_adj[v].push_back(c);
                chk_adj[c].push_back(v);
                ++chk_deg[c];
            }
        }
        if (dead) continue;
        std::vector<std::pair<int, int>> edges;
        for (int v = 0; v < n_vars; ++v)
            for (int c : var_adj[v]) edges.emplace_back(v, c);
        TannerGraph g = make_graph(n_vars, m, edges);
        if (g.regular && is_four_cycle_free(g)) return g;
    }
    throw std::runtime_error("random_regular_code: no 4-cycle-free fill");
}

const std::vector<std::pair<int, int>>& deg5_octet_edges() {
    // complement of the two disjoint 4-cycles (0 2 4 6) and (1 3 5 7);
    // every vertex misses exactly its two cycle neighbours
    static const std::vector<std::pair<int, int>> edges = [] {
        std::set<std::pair<int, int>> missing;
        const int even[4] = {0, 2, 4, 6}, odd[4] = {1, 3, 5, 7};
        for (int k = 0; k < 4; ++k) {
            auto put = [&](int x, int y) {
                missing.insert({std::min(x, y), std::max(x, y)});
            };
            put(even[k], even[(k + 1) % 4]);
            put(odd[k], odd[(k + 1) % 4]);
        }
        std::vector<std::pair<int, int>> out;
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j)
                if (!missing.count({i, j})) out.emplace_back(i, j);
        return out;
    }();
    return edges;
}

TannerGraph octet_host() {
    std::vector<std::pair<int, int>> edges;
    int c = 0;
    for (const auto& [u, v] : deg5_octet_edges()) {
        edges.emplace_back(u, c);
        edges.emplace_back(v, c);
        ++c;
    }
    for (int v = 0; v < 8; ++v) edges.emplace_back(v, c++);
    return make_graph(8, c, edges);
}

PlantedCode planted_code(int p, int d_v, int d_c) {
    const TannerGraph base = array_code(p, d_v, d_c);
    const int n0 = base.n_vars, m0 = base.n_checks;
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v < n0; ++v)
        for (int c : base.var_adj[v]) edges.emplace_back(v, c);
    int c = m0;
    for (const auto& [u, v] : deg5_octet_edges()) {
        edges.emplace_back(n0 + u, c);
        edges.emplace_back(n0 + v, c);
        ++c;
    }
    PlantedCode out;
    // Anchor checks have degree 4: the member plus three array variables of
    // one block column. Same-column variables never share an array check, so
    // no 4-cycle appears, and the two co-variables damp the member's wrong
    // belief early on the way into the host, like a high-degree unsatisfied
    // check would.
    if (p < 12)
        throw std::invalid_argument("planted_code: block size below 12");
    for (int k = 0; k < 8; ++k) {
        edges.emplace_back(n0 + k, c);
        const int col = k < 4 ? 0 : 1;
        for (int t = 0; t < 3; ++t)
            edges.emplace_back(col * p + 3 * (k % 4) + t, c);
        ++c;
        out.members.push_back(n0 + k);
    }
    out.g = make_graph(n0 + 8, c, edges);
    return out;
}

double phi_simpson(double m, int intervals) {
    if (m == 0.0) return 1.0;
    const double T = std::min(90.0, 35.0 * std::sqrt(m) + 1.0);
    const double h = T / intervals;
    auto f = [&](double u) {
        return 1.0 / std::cosh(0.5 * u) * std::exp(-u * u / (4.0 * m));
    };
    double acc = f(0.0) + f(T);
    for (int i = 1; i < intervals; ++i)
        acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
    const double integral = 2.0 * acc * h / 3.0;  // even integrand
    return std::min(
        1.0, std::exp(-m / 4.0) / std::sqrt(4.0 * M_PI * m) * integral);
}

namespace {

double phi_inv_simpson(double y) {
    double lo = 0.0, hi = 1.0;
    while (phi_simpson(hi) > y) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (phi_simpson(mid) > y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> de_reference(int d_v, int d_c, double m_lambda,
                                 int iters) {
    std::vector<double> m_ex;
    double prev = 0.0;
    for (int i = 0; i < iters; ++i) {
        const double mv = m_lambda + (d_v - 1) * prev;
        const double z = phi_simpson(mv);
        // expm1/log1p keep 1 - (1-z)^(d_c-1) accurate once z shrinks below
        // the 1 ulp cancellation point
        const double w = -std::expm1((d_c - 1) * std::log1p(-z));
        prev = phi_inv_simpson(w);
        m_ex.push_back(prev);
    }
    return m_ex;
}

DecodeOutcome reference_decode(const TannerGraph& g,
                               const std::vector<double>& llr, int max_iters,
                               bool min_sum, double llr_clip) {
    const int n = g.n_vars, m = g.n_checks;
    auto clamp = [&](double x) {
        return std::max(-llr_clip, std::min(llr_clip, x));
    };
    // messages indexed [check][position of var in chk_adj]
    std::vector<std::vector<double>> r(m), q(m);
    for (int c = 0; c < m; ++c) {
        r[c].assign(g.chk_adj[c].size(), 0.0);
        q[c].assign(g.chk_adj[c].size(), 0.0);
    }
    DecodeOutcome out;
    out.decisions.assign(n, 0);
    for (int iter = 1; iter <= max_iters; ++iter) {
        for (int v = 0; v < n; ++v) {
            double sum = 0.0;
            for (int c : g.var_adj[v]) {
                const auto& row = g.chk_adj[c];
                const std::size_t k =
                    std::lower_bound(row.begin(), row.end(), v) - row.begin();
                sum += r[c][k];
            }
            for (int c : g.var_adj[v]) {
                const auto& row = g.chk_adj[c];
                const std::size_t k =
                    std::lower_bound(row.begin(), row.end(), v) - row.begin();
                q[c][k] = clamp(llr[v] + sum - r[c][k]);
            }
        }
        for (int c = 0; c < m; ++c) {
            const std::size_t deg = g.chk_adj[c].size();
            for (std::size_t k = 0; k < deg; ++k) {
                if (min_sum) {
                    int sgn = 1;
                    double mn = 1e300;
                    for (std::size_t j = 0; j < deg; ++j) {
                        if (j == k) continue;
                        if (q[c][j] < 0.0) sgn = -sgn;
                        mn = std::min(mn, std::abs(q[c][j]));
                    }
                    r[c][k] = clamp(sgn * mn);
                } else {
                    double prod = 1.0;
                    for (std::size_t j = 0; j < deg; ++j)
                        if (j != k) prod *= std::tanh(0.5 * q[c][j]);
                    prod = std::max(-(1.0 - 1e-15),
                                    std::min(1.0 - 1e-15, prod));
                    r[c][k] = clamp(2.0 * std::atanh(prod));
                }
            }
        }
        std::vector<int> support;
        for (int v = 0; v < n; ++v) {
            double total = llr[v];
            for (int c : g.var_adj[v]) {
                const auto& row = g.chk_adj[c];
                const std::size_t k =
                    std::lower_bound(row.begin(), row.end(), v) - row.begin();
                total += r[c][k];
            }
            out.decisions[v] = total < 0.0 ? 1 : 0;
            if (out.decisions[v]) support.push_back(v);
        }
        out.trace.push_back(support);
        out.iterations = iter;
        bool clean = true;
        for (int c = 0; c < m && clean; ++c) {
            int parity = 0;
            for (int v : g.chk_adj[c]) parity ^= out.decisions[v];
            clean = parity == 0;
        }
        if (clean) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace efloor::testsupport
