#include "efloor/topology.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace efloor {

namespace {

// Erdos-Gallai: necessary and sufficient for a simple graph on the plain
// sequence; with forbidden pairs it stays necessary and is used as a prune.
bool graphical(std::vector<int> d) {
    long long sum = 0;
    for (int x : d) {
        if (x < 0) return false;
        sum += x;
    }
    if (sum % 2 != 0) return false;
    std::sort(d.begin(), d.end(), std::greater<int>());
    int n = static_cast<int>(d.size());
    long long lhs = 0;
    for (int k = 1; k <= n; ++k) {
        lhs += d[k - 1];
        long long rhs = static_cast<long long>(k) * (k - 1);
        for (int i = k; i < n; ++i) rhs += std::min(d[i], k);
        if (lhs > rhs) return false;
    }
    return true;
}

void classes_rec(int slots, int max_val, int min_val, int target,
                 std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (slots == 0) {
        if (target == 0) out.push_back(cur);
        return;
    }
    for (int v = std::min(max_val, target); v >= min_val; --v) {
        if (target - v < (slots - 1) * min_val) continue;
        if (target - v > (slots - 1) * v) continue;
        cur.push_back(v);
        classes_rec(slots - 1, v, min_val, target - v, cur, out);
        cur.pop_back();
    }
}

// Labelled enumeration of simple graphs with given residual degrees and
// forbidden pairs. Completeness: vertex v's neighbourhood among {v+1..n-1}
// is chosen exhaustively before moving on, so each labelled graph is built
// exactly once. Isomorph collapse happens in the caller via certificates.
class TopoEnumerator {
  public:
    TopoEnumerator(std::vector<int> residual, std::vector<uint16_t> banned,
                   long long* budget, std::function<void(const std::vector<std::pair<int, int>>&)> emit)
        : n_(static_cast<int>(residual.size())),
          res_(std::move(residual)),
          banned_(std::move(banned)),
          budget_(budget),
          emit_(std::move(emit)) {}

    void run() { extend(0); }

    // Fixes vertex 0's neighbourhood to the lowest-indexed vertices of each
    // original-degree class, one pattern per degree multiset. Sound only for
    // plain enumeration (no forbidden pairs): relabelling within a degree
    // class is an isomorphism, so every class has such a representative.
    void run_rooted(const std::vector<int>& orig_deg) {
        if (n_ < 2 || res_[0] == 0) {
            run();
            return;
        }
        std::vector<std::pair<int, int>> cls;  // (start index, size), vertices 1..n-1
        for (int i = 1; i < n_; ++i) {
            if (!cls.empty() && orig_deg[i] == orig_deg[cls.back().first])
                ++cls.back().second;
            else
                cls.push_back({i, 1});
        }
        std::vector<int> take(cls.size(), 0);
        root_patterns(cls, take, 0, res_[0]);
    }

  private:
    void spend() {
        if (--(*budget_) < 0)
            throw std::runtime_error("enumerate_realizations: work bound exceeded");
    }

    bool allowed(int u, int v) const { return !banned_[u * n_ + v]; }

    void root_patterns(const std::vector<std::pair<int, int>>& cls,
                       std::vector<int>& take, size_t k, int need) {
        if (k == cls.size()) {
            if (need != 0) return;
            std::vector<int> nbrs;
            for (size_t i = 0; i < cls.size(); ++i)
                for (int j = 0; j < take[i]; ++j) nbrs.push_back(cls[i].first + j);
            for (int u : nbrs) {
                edges_.push_back({0, u});
                --res_[0];
                --res_[u];
            }
            extend(1);
            for (int u : nbrs) {
                edges_.pop_back();
                ++res_[0];
                ++res_[u];
            }
            return;
        }
        int cap = std::min(cls[k].second, need);
        for (int t = 0; t <= cap; ++t) {
            take[k] = t;
            root_patterns(cls, take, k + 1, need - t);
        }
        take[k] = 0;
    }

    void extend(int v) {
        spend();
        if (v == n_) {
            emit_(edges_);
            return;
        }
        if (res_[v] == 0) {
            extend(v + 1);
            return;
        }
        std::vector<int> cand;
        for (int u = v + 1; u < n_; ++u)
            if (res_[u] > 0 && allowed(v, u)) cand.push_back(u);
        if (static_cast<int>(cand.size()) < res_[v]) return;
        if (!feasible_tail(v)) return;
        choose(v, cand, 0, res_[v]);
    }

    // Necessary condition on the unfinished suffix, ignoring bans.
    bool feasible_tail(int v) const {
        std::vector<int> tail(res_.begin() + v, res_.end());
        return graphical(std::move(tail));
    }

    void choose(int v, const std::vector<int>& cand, size_t idx, int need) {
        if (need == 0) {
            extend(v + 1);
            return;
        }
        if (cand.size() - idx < static_cast<size_t>(need)) return;
        spend();
        int u = cand[idx];
        if (res_[u] > 0) {
            edges_.push_back({v, u});
            --res_[v];
            --res_[u];
            choose(v, cand, idx + 1, need - 1);
            ++res_[v];
            ++res_[u];
            edges_.pop_back();
        }
        choose(v, cand, idx + 1, need);
    }

    int n_;
    std::vector<int> res_;
    std::vector<uint16_t> banned_;
    long long* budget_;
    std::function<void(const std::vector<std::pair<int, int>>&)> emit_;
    std::vector<std::pair<int, int>> edges_;
};

std::vector<uint16_t> ban_matrix(int n, const std::vector<std::array<int, 4>>& quads) {
    std::vector<uint16_t> banned(static_cast<size_t>(n) * n, 0);
    for (const auto& q : quads)
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                banned[q[i] * n + q[j]] = 1;
                banned[q[j] * n + q[i]] = 1;
            }
    return banned;
}

void validate_deg_seq(const std::vector<int>& deg_seq) {
    int n = static_cast<int>(deg_seq.size());
    if (n < 1) throw std::invalid_argument("enumerate_realizations: empty degree sequence");
    if (n > 12) throw std::invalid_argument("enumerate_realizations: more than 12 nodes");
    for (int d : deg_seq) {
        if (d < 1) throw std::invalid_argument("enumerate_realizations: degree below 1");
    }
}

}  // namespace

int TopologyRealization::degree(int v) const {
    int d = 0;
    for (const auto& e : edges) d += (e.first == v) + (e.second == v);
    for (const auto& q : quad_checks) d += std::count(q.begin(), q.end(), v);
    return d;
}

std::vector<std::vector<int>> enumerate_classes(int a, int b, int d_v) {
    if (a < 1) throw std::invalid_argument("enumerate_classes: a must be at least 1");
    if (d_v < 2) throw std::invalid_argument("enumerate_classes: d_v must be at least 2");
    int lo = d_v / 2 + 1;  // smallest strict-majority degree
    int b_max = a * (d_v - lo);
    if (b < 0 || b > b_max)
        throw std::invalid_argument("enumerate_classes: infeasible (a,b): b must lie in [0," +
                                    std::to_string(b_max) + "]");
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    classes_rec(a, d_v, lo, a * d_v - b, cur, out);
    return out;
}

std::vector<TopologyRealization> enumerate_realizations(const std::vector<int>& deg_seq,
                                                        bool allow_quad,
                                                        long long work_bound) {
    validate_deg_seq(deg_seq);
    std::vector<int> deg = deg_seq;
    std::sort(deg.begin(), deg.end(), std::greater<int>());
    int n = static_cast<int>(deg.size());
    long long sum = std::accumulate(deg.begin(), deg.end(), 0LL);
    std::map<std::string, TopologyRealization> found;
    // Unrealizable requests yield nothing rather than erroring: a member of
    // an a-set meets at most a - 1 distinct partners (quads included, since
    // two even checks through one member share no second member), and a
    // pairwise degree sum is even.
    if (sum % 2 != 0) return {};
    if (deg.front() > n - 1) return {};
    long long budget = work_bound;

    auto emit = [&](const std::vector<std::pair<int, int>>& edges,
                    const std::vector<std::array<int, 4>>& quads) {
        std::string cert = canonical_form(n, edges, quads);
        if (found.count(cert)) return;
        TopologyRealization r;
        r.a = n;
        r.b = -1;  // callers annotate once d_v is known
        r.deg_seq = deg;
        r.edges = edges;
        std::sort(r.edges.begin(), r.edges.end());
        r.quad_checks = quads;
        std::sort(r.quad_checks.begin(), r.quad_checks.end());
        r.certificate = cert;
        found.emplace(std::move(cert), std::move(r));
    };

    if (graphical(deg)) {
        TopoEnumerator en(deg, std::vector<uint16_t>(static_cast<size_t>(n) * n, 0), &budget,
                          [&](const std::vector<std::pair<int, int>>& e) { emit(e, {}); });
        en.run_rooted(deg);
    }

    if (allow_quad && n >= 4) {
        std::vector<std::vector<std::array<int, 4>>> groupings;
        std::vector<int> pick;
        std::function<void(int)> subsets = [&](int start) {
            if (pick.size() == 4) {
                groupings.push_back({{pick[0], pick[1], pick[2], pick[3]}});
                return;
            }
            for (int v = start; v < n; ++v) {
                pick.push_back(v);
                subsets(v + 1);
                pick.pop_back();
            }
        };
        subsets(0);
        size_t singles = groupings.size();
        for (size_t i = 0; i < singles; ++i)
            for (size_t j = i + 1; j < singles; ++j) {
                const auto& q1 = groupings[i][0];
                const auto& q2 = groupings[j][0];
                int overlap = 0;
                for (int x : q1)
                    for (int y : q2) overlap += (x == y);
                // Two set nodes sharing two checks would close a 4-cycle.
                if (overlap <= 1) groupings.push_back({q1, q2});
            }

        for (const auto& quads : groupings) {
            std::vector<int> res = deg;
            bool ok = true;
            for (const auto& q : quads)
                for (int v : q)
                    if (--res[v] < 0) ok = false;
            if (!ok) continue;
            if (std::accumulate(res.begin(), res.end(), 0LL) % 2 != 0) continue;
            if (!graphical(res)) continue;
            TopoEnumerator en(res, ban_matrix(n, quads), &budget,
                              [&](const std::vector<std::pair<int, int>>& e) { emit(e, quads); });
            en.run();
        }
    }

    std::vector<TopologyRealization> out;
    out.reserve(found.size());
    for (auto& kv : found) out.push_back(std::move(kv.second));
    return out;
}

namespace {

// Refinement-plus-backtracking canonical labelling. Colours are iteratively
// split by neighbour-colour multisets; non-singleton cells are resolved by
// individualising every member, and the certificate is the lexicographic
// minimum over the resulting complete labellings. Exact for this size range.
class Canonicalizer {
  public:
    Canonicalizer(int n_total, int n_base, const std::vector<uint32_t>& adj)
        : n_(n_total), base_(n_base), adj_(adj) {}

    std::string run() {
        std::vector<std::vector<int>> cells;
        std::vector<int> base_cell, aux_cell;
        for (int v = 0; v < n_; ++v) (v < base_ ? base_cell : aux_cell).push_back(v);
        if (!base_cell.empty()) cells.push_back(base_cell);
        if (!aux_cell.empty()) cells.push_back(aux_cell);
        refine(cells);
        backtrack(cells);
        return best_;
    }

  private:
    void refine(std::vector<std::vector<int>>& cells) {
        for (;;) {
            std::vector<int> colour(n_);
            for (size_t c = 0; c < cells.size(); ++c)
                for (int v : cells[c]) colour[v] = static_cast<int>(c);
            std::vector<std::vector<int>> next;
            bool split = false;
            for (const auto& cell : cells) {
                if (cell.size() == 1) {
                    next.push_back(cell);
                    continue;
                }
                std::map<std::vector<int>, std::vector<int>> groups;
                for (int v : cell) {
                    std::vector<int> key;
                    for (int u = 0; u < n_; ++u)
                        if (adj_[v] >> u & 1u) key.push_back(colour[u]);
                    std::sort(key.begin(), key.end());
                    groups[key].push_back(v);
                }
                if (groups.size() > 1) split = true;
                for (auto& kv : groups) next.push_back(std::move(kv.second));
            }
            cells.swap(next);
            if (!split) return;
        }
    }

    void backtrack(const std::vector<std::vector<int>>& cells) {
        size_t first = cells.size();
        for (size_t c = 0; c < cells.size(); ++c)
            if (cells[c].size() > 1) {
                first = c;
                break;
            }
        if (first == cells.size()) {
            std::vector<int> order;
            for (const auto& cell : cells) order.push_back(cell[0]);
            std::string s;
            s.reserve(static_cast<size_t>(n_) * (n_ - 1) / 2);
            for (int i = 0; i < n_; ++i)
                for (int j = i + 1; j < n_; ++j)
                    s.push_back((adj_[order[i]] >> order[j] & 1u) ? '1' : '0');
            if (best_.empty() || s < best_) best_ = std::move(s);
            return;
        }
        for (int v : cells[first]) {
            std::vector<std::vector<int>> next;
            for (size_t c = 0; c < cells.size(); ++c) {
                if (c != first) {
                    next.push_back(cells[c]);
                    continue;
                }
                next.push_back({v});
                std::vector<int> rest;
                for (int u : cells[c])
                    if (u != v) rest.push_back(u);
                next.push_back(std::move(rest));
            }
            refine(next);
            backtrack(next);
        }
    }

    int n_, base_;
    const std::vector<uint32_t>& adj_;
    std::string best_;
};

}  // namespace

std::string canonical_form(int n, const std::vector<std::pair<int, int>>& edges,
                           const std::vector<std::array<int, 4>>& quad_checks) {
    if (n < 1 || n > 16)
        throw std::invalid_argument("canonical_form: node count must be in [1,16]");
    int total = n + static_cast<int>(quad_checks.size());
    std::vector<uint32_t> adj(total, 0);
    auto link = [&](int u, int v) {
        if (u < 0 || v < 0 || u >= total || v >= total || u == v)
            throw std::invalid_argument("canonical_form: bad edge endpoint");
        adj[u] |= 1u << v;
        adj[v] |= 1u << u;
    };
    for (const auto& e : edges) {
        if (e.first >= n || e.second >= n)
            throw std::invalid_argument("canonical_form: edge endpoint out of range");
        link(e.first, e.second);
    }
    for (size_t q = 0; q < quad_checks.size(); ++q)
        for (int v : quad_checks[q]) {
            if (v >= n) throw std::invalid_argument("canonical_form: quad member out of range");
            link(v, n + static_cast<int>(q));
        }
    std::ostringstream head;
    head << "n" << n << "q" << quad_checks.size() << ":";
    return head.str() + Canonicalizer(total, n, adj).run();
}

ReductionOutcome reduce_realization(const TopologyRealization& r, int d_v,
                                    const std::vector<int>& removed) {
    std::vector<char> gone(r.a, 0);
    for (int v : removed) {
        if (v < 0 || v >= r.a) throw std::invalid_argument("reduce_realization: bad vertex");
        if (gone[v]) throw std::invalid_argument("reduce_realization: duplicate vertex");
        gone[v] = 1;
    }
    if (static_cast<int>(removed.size()) >= r.a)
        throw std::invalid_argument("reduce_realization: cannot remove every node");

    std::vector<int> deg(r.a, 0);
    for (int v = 0; v < r.a; ++v) deg[v] = r.degree(v);
    for (int v = 0; v < r.a; ++v)
        if (deg[v] > d_v) throw std::invalid_argument("reduce_realization: degree exceeds d_v");

    // Odd checks of a survivor: its original single-touch deficit, plus pair
    // checks whose partner died, plus quad checks left touching 1 or 3 times.
    int b = 0;
    std::vector<int> new_deg = deg;
    for (int v = 0; v < r.a; ++v)
        if (!gone[v]) b += d_v - deg[v];
    for (const auto& e : r.edges) {
        bool g1 = gone[e.first], g2 = gone[e.second];
        if (g1 != g2) {
            ++b;
            --new_deg[g1 ? e.second : e.first];
        }
    }
    for (const auto& q : r.quad_checks) {
        int alive = 0;
        for (int v : q) alive += !gone[v];
        if (alive == 3 || alive == 1) {
            ++b;
            for (int v : q)
                if (!gone[v]) --new_deg[v];
        }
    }

    ReductionOutcome out;
    out.a = r.a - static_cast<int>(removed.size());
    out.b = b;
    out.valid = out.a >= 1;
    for (int v = 0; v < r.a; ++v) {
        if (gone[v]) continue;
        out.deg_seq.push_back(new_deg[v]);
        if (2 * new_deg[v] <= d_v) out.valid = false;  // strict majority required
    }
    std::sort(out.deg_seq.begin(), out.deg_seq.end(), std::greater<int>());
    return out;
}

ReductionClosureResult reduction_closure(
    const std::vector<TopologyRealization>& realizations, int d_v,
    const std::vector<std::pair<int, int>>& known_absent) {
    std::set<std::pair<int, int>> absent(known_absent.begin(), known_absent.end());
    ReductionClosureResult out;
    for (const auto& r : realizations) {
        std::vector<std::vector<int>> removals;
        for (int v = 0; v < r.a; ++v) removals.push_back({v});
        for (int v = 0; v < r.a; ++v)
            for (int w = v + 1; w < r.a; ++w) removals.push_back({v, w});
        bool pruned = false;
        for (const auto& rem : removals) {
            if (static_cast<int>(rem.size()) >= r.a) continue;
            ReductionOutcome res = reduce_realization(r, d_v, rem);
            if (res.valid && absent.count({res.a, res.b})) {
                out.pruned.push_back({r.certificate, rem, res.a, res.b});
                pruned = true;
                break;
            }
        }
        if (!pruned) out.survivors.push_back(r);
    }
    return out;
}

std::string topologies_to_json(const std::vector<TopologyRealization>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : v) {
        nlohmann::json o;
        o["a"] = r.a;
        o["b"] = r.b;
        o["deg_seq"] = r.deg_seq;
        nlohmann::json edges = nlohmann::json::array();
        for (const auto& e : r.edges) edges.push_back({e.first, e.second});
        o["edges"] = std::move(edges);
        nlohmann::json quads = nlohmann::json::array();
        for (const auto& q : r.quad_checks) quads.push_back({q[0], q[1], q[2], q[3]});
        o["quad_checks"] = std::move(quads);
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

std::vector<TopologyRealization> topologies_from_json(const std::string& text) {
    nlohmann::json arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw std::runtime_error("topology JSON: expected an array");
    std::vector<TopologyRealization> out;
    for (const auto& o : arr) {
        TopologyRealization r;
        r.a = o.at("a").get<int>();
        r.b = o.at("b").get<int>();
        r.deg_seq = o.at("deg_seq").get<std::vector<int>>();
        for (const auto& e : o.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw std::runtime_error("topology JSON: bad edge");
            int u = e[0].get<int>(), v = e[1].get<int>();
            r.edges.push_back({std::min(u, v), std::max(u, v)});
        }
        for (const auto& q : o.at("quad_checks")) {
            if (!q.is_array() || q.size() != 4) throw std::runtime_error("topology JSON: bad quad check");
            std::array<int, 4> g{q[0].get<int>(), q[1].get<int>(), q[2].get<int>(), q[3].get<int>()};
            std::sort(g.begin(), g.end());
            r.quad_checks.push_back(g);
        }
        std::sort(r.edges.begin(), r.edges.end());
        std::sort(r.quad_checks.begin(), r.quad_checks.end());
        if (std::adjacent_find(r.edges.begin(), r.edges.end()) != r.edges.end())
            throw std::runtime_error("topology JSON: duplicate edge");
        if (std::adjacent_find(r.quad_checks.begin(), r.quad_checks.end()) != r.quad_checks.end())
            throw std::runtime_error("topology JSON: duplicate quad check");
        if (static_cast<int>(r.deg_seq.size()) != r.a)
            throw std::runtime_error("topology JSON: deg_seq length disagrees with a");
        std::vector<int> check(r.a, 0);
        for (const auto& e : r.edges) {
            if (e.first < 0 || e.second >= r.a || e.first == e.second)
                throw std::runtime_error("topology JSON: edge endpoint out of range");
            ++check[e.first];
            ++check[e.second];
        }
        for (const auto& g : r.quad_checks)
            for (int v : g) {
                if (v < 0 || v >= r.a) throw std::runtime_error("topology JSON: quad member out of range");
                ++check[v];
            }
        std::sort(check.begin(), check.end(), std::greater<int>());
        std::vector<int> declared = r.deg_seq;
        std::sort(declared.begin(), declared.end(), std::greater<int>());
        if (check != declared)
            throw std::runtime_error("topology JSON: edges disagree with deg_seq");
        r.certificate = canonical_form(r.a, r.edges, r.quad_checks);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace efloor
