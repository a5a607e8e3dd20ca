#include "efloor/absorption.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "json.hpp"

namespace efloor {

namespace {

std::vector<int> checked_sorted_vars(const TannerGraph& g, const std::vector<int>& vars) {
    if (vars.empty()) throw std::invalid_argument("variable set must be nonempty");
    std::vector<int> v = vars;
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end())
        throw std::invalid_argument("duplicate variable index in set");
    if (v.front() < 0 || v.back() >= g.n_vars)
        throw std::invalid_argument("variable index out of range");
    return v;
}

// Times each neighbouring check is touched by the set.
std::map<int, int> touch_counts(const TannerGraph& g, const std::vector<int>& vars) {
    std::map<int, int> touch;
    for (int v : vars)
        for (int c : g.var_adj[v]) ++touch[c];
    return touch;
}

bool adjacent_to(const TannerGraph& g, int v, int c) {
    return std::binary_search(g.var_adj[v].begin(), g.var_adj[v].end(), c);
}

}  // namespace

bool is_stopping_set(const TannerGraph& g, const std::vector<int>& vars) {
    std::vector<int> v = checked_sorted_vars(g, vars);
    for (const auto& tc : touch_counts(g, v))
        if (tc.second < 2) return false;
    return true;
}

AbsorptionVerdict is_absorption_set(const TannerGraph& g, const std::vector<int>& vars) {
    std::vector<int> v = checked_sorted_vars(g, vars);
    std::map<int, int> touch = touch_counts(g, v);
    AbsorptionVerdict out;
    out.is_absorption = true;
    out.deg.reserve(v.size());
    for (int var : v) {
        int deg = 0;
        for (int c : g.var_adj[var])
            if (touch.at(c) % 2 == 0) ++deg;
        out.deg.push_back(deg);
        if (2 * deg <= g.var_degree(var)) out.is_absorption = false;
    }
    return out;
}

AbsorptionSet analyze_set(const TannerGraph& g, const std::vector<int>& vars) {
    AbsorptionSet s;
    s.vars = checked_sorted_vars(g, vars);
    s.a = static_cast<int>(s.vars.size());
    std::map<int, int> touch = touch_counts(g, s.vars);
    for (const auto& tc : touch) {
        if (tc.second % 2 == 0)
            s.sat_checks.push_back(tc);
        else
            s.unsat_checks.push_back(tc.first);
    }
    s.b = static_cast<int>(s.unsat_checks.size());
    for (int var : s.vars) {
        int deg = 0;
        for (int c : g.var_adj[var])
            if (touch.at(c) % 2 == 0) ++deg;
        s.deg_profile.push_back(deg);
    }
    return s;
}

Classification classify(const AbsorptionSet& s) {
    Classification c;
    c.a = s.a;
    c.b = s.b;
    c.deg_profile = s.deg_profile;
    std::sort(c.deg_profile.begin(), c.deg_profile.end(), std::greater<int>());
    int g = s.b == 0 ? s.a : std::gcd(s.b, s.a);
    c.avg_emd = {s.b / g, s.a / g};
    for (const auto& sc : s.sat_checks)
        if (sc.second == 4) ++c.quad_checks;
    std::ostringstream os;
    os << "deg=[";
    for (size_t i = 0; i < c.deg_profile.size(); ++i)
        os << (i ? " " : "") << c.deg_profile[i];
    os << "] quads=" << c.quad_checks;
    c.label = os.str();
    return c;
}

bool SetCatalog::add(AbsorptionSet s, std::string origin) {
    if (!index_.insert(s.vars).second) return false;
    CatalogEntry e;
    e.class_label = classify(s).label;
    e.set = std::move(s);
    e.origin = std::move(origin);
    entries.push_back(std::move(e));
    return true;
}

void SetCatalog::finalize() {
    std::sort(entries.begin(), entries.end(),
              [](const CatalogEntry& x, const CatalogEntry& y) { return x.set.vars < y.set.vars; });
}

std::map<std::pair<int, int>, long long> SetCatalog::multiplicities() const {
    std::map<std::pair<int, int>, long long> m;
    for (const auto& e : entries) ++m[{e.set.a, e.set.b}];
    return m;
}

std::map<int, long long> SetCatalog::participation(int a, int b) const {
    std::map<int, long long> m;
    for (const auto& e : entries)
        if (e.set.a == a && e.set.b == b)
            for (int v : e.set.vars) ++m[v];
    return m;
}

SetCatalog brute_force_enumerate(const TannerGraph& g, int max_a, long long work_bound) {
    if (max_a < 1) throw std::invalid_argument("brute_force_enumerate: max_a must be at least 1");
    long long total = 0;
    for (int k = 1; k <= std::min(max_a, g.n_vars); ++k) {
        long long c = 1;
        for (int i = 0; i < k; ++i) {
            c = c * (g.n_vars - i) / (i + 1);
            if (c > work_bound) break;
        }
        total += c;
        if (total > work_bound)
            throw std::runtime_error("brute_force_enumerate: subset count exceeds work bound");
    }

    SetCatalog cat;
    std::vector<int> comb;
    for (int k = 1; k <= std::min(max_a, g.n_vars); ++k) {
        comb.assign(k, 0);
        std::iota(comb.begin(), comb.end(), 0);
        for (;;) {
            AbsorptionVerdict v = is_absorption_set(g, comb);
            if (v.is_absorption) cat.add(analyze_set(g, comb), "brute-force");
            int i = k - 1;
            while (i >= 0 && comb[i] == g.n_vars - k + i) --i;
            if (i < 0) break;
            ++comb[i];
            for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
        }
    }
    cat.finalize();
    return cat;
}

namespace {

// Placement schedule for the embedding DFS: one topology vertex per step,
// most-constrained-first, with the constraints binding it to earlier steps.
struct StepPlan {
    int t = -1;
    std::vector<int> prev_pair;                // earlier topo vertices joined by a pair edge
    std::vector<std::vector<int>> prev_quad;   // per quad group of t, earlier members
};

struct Embedder {
    const TannerGraph& g;
    const TopologyRealization& topo;
    std::vector<StepPlan> plan;
    std::string target_cert;

    Embedder(const TannerGraph& graph, const TopologyRealization& t) : g(graph), topo(t) {
        const int a = topo.a;
        std::vector<std::vector<int>> nbr(a);
        for (const auto& e : topo.edges) {
            nbr[e.first].push_back(e.second);
            nbr[e.second].push_back(e.first);
        }
        std::vector<std::vector<int>> vgroups(a);
        for (size_t qi = 0; qi < topo.quad_checks.size(); ++qi)
            for (int m : topo.quad_checks[qi]) vgroups[m].push_back(static_cast<int>(qi));

        std::vector<char> placed(a, 0);
        for (int step = 0; step < a; ++step) {
            int best = -1, best_cons = -1, best_deg = -1;
            for (int t2 = 0; t2 < a; ++t2) {
                if (placed[t2]) continue;
                int cons = 0;
                for (int u : nbr[t2]) cons += placed[u];
                for (int qi : vgroups[t2])
                    for (int m : topo.quad_checks[qi]) cons += (m != t2 && placed[m]);
                int deg = static_cast<int>(nbr[t2].size() + vgroups[t2].size());
                if (cons > best_cons || (cons == best_cons && deg > best_deg)) {
                    best = t2;
                    best_cons = cons;
                    best_deg = deg;
                }
            }
            StepPlan sp;
            sp.t = best;
            for (int u : nbr[best])
                if (placed[u]) sp.prev_pair.push_back(u);
            for (int qi : vgroups[best]) {
                std::vector<int> earlier;
                for (int m : topo.quad_checks[qi])
                    if (m != best && placed[m]) earlier.push_back(m);
                sp.prev_quad.push_back(std::move(earlier));
            }
            plan.push_back(std::move(sp));
            placed[best] = 1;
        }
        target_cert = canonical_form(a, topo.edges, topo.quad_checks);
    }

    // One worker's search below a fixed root assignment.
    void search_from_root(int root_var, std::vector<std::vector<int>>& out) const {
        std::vector<int> map_var(topo.a, -1);
        std::vector<char> used(g.n_vars, 0);
        map_var[plan[0].t] = root_var;
        used[root_var] = 1;
        dfs(1, map_var, used, out);
    }

  private:
    bool satisfies(int w, const StepPlan& sp, const std::vector<int>& map_var) const {
        for (int u : sp.prev_pair)
            if (g.shared_check(w, map_var[u]) < 0) return false;
        for (const auto& earlier : sp.prev_quad) {
            if (earlier.empty()) continue;
            if (earlier.size() == 1) {
                if (g.shared_check(w, map_var[earlier[0]]) < 0) return false;
            } else {
                // Two placed members pin the group's check: 4-cycle-freeness
                // leaves them at most one check in common.
                int c = g.shared_check(map_var[earlier[0]], map_var[earlier[1]]);
                if (c < 0 || !adjacent_to(g, w, c)) return false;
            }
        }
        return true;
    }

    void dfs(int k, std::vector<int>& map_var, std::vector<char>& used,
             std::vector<std::vector<int>>& out) const {
        if (k == topo.a) {
            verify(map_var, out);
            return;
        }
        const StepPlan& sp = plan[k];

        // Candidates come from the tightest available constraint; remaining
        // constraints filter. Only positive (must-share) conditions are
        // enforced: extra shared checks make the final certificate differ,
        // so over-connected embeddings are rejected at verification instead.
        std::vector<int> cand;
        const std::vector<int>* gen_pool = nullptr;
        for (const auto& earlier : sp.prev_quad)
            if (earlier.size() >= 2) {
                int c = g.shared_check(map_var[earlier[0]], map_var[earlier[1]]);
                if (c < 0) return;
                gen_pool = &g.chk_adj[c];
                break;
            }
        if (gen_pool) {
            cand.assign(gen_pool->begin(), gen_pool->end());
        } else {
            int anchor = -1;
            if (!sp.prev_pair.empty()) anchor = map_var[sp.prev_pair[0]];
            for (const auto& earlier : sp.prev_quad)
                if (anchor < 0 && earlier.size() == 1) anchor = map_var[earlier[0]];
            if (anchor >= 0) {
                for (int c : g.var_adj[anchor])
                    for (int w : g.chk_adj[c]) cand.push_back(w);
                std::sort(cand.begin(), cand.end());
                cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
            } else {
                cand.resize(g.n_vars);  // unconstrained step (disconnected topology)
                std::iota(cand.begin(), cand.end(), 0);
            }
        }

        for (int w : cand) {
            if (used[w]) continue;
            if (!satisfies(w, sp, map_var)) continue;
            map_var[sp.t] = w;
            used[w] = 1;
            dfs(k + 1, map_var, used, out);
            used[w] = 0;
            map_var[sp.t] = -1;
        }
    }

    // A candidate counts only if it passes the absorption predicate and its
    // actual even-connection structure matches the target exactly.
    void verify(const std::vector<int>& map_var, std::vector<std::vector<int>>& out) const {
        std::vector<int> s(map_var);
        std::sort(s.begin(), s.end());
        std::map<int, int> touch;
        for (int v : s)
            for (int c : g.var_adj[v]) ++touch[c];
        for (size_t i = 0; i < s.size(); ++i) {
            int deg = 0;
            for (int c : g.var_adj[s[i]])
                if (touch.at(c) % 2 == 0) ++deg;
            if (2 * deg <= g.var_degree(s[i])) return;
        }
        std::vector<std::pair<int, int>> edges;
        std::vector<std::array<int, 4>> quads;
        for (const auto& tc : touch) {
            if (tc.second % 2 != 0) continue;
            if (tc.second > 4) return;  // outside the modelled structures
            std::vector<int> pos;
            for (size_t i = 0; i < s.size(); ++i)
                if (adjacent_to(g, s[i], tc.first)) pos.push_back(static_cast<int>(i));
            if (tc.second == 2)
                edges.push_back({pos[0], pos[1]});
            else
                quads.push_back({pos[0], pos[1], pos[2], pos[3]});
        }
        if (canonical_form(topo.a, edges, quads) != target_cert) return;
        out.push_back(std::move(s));
    }
};

}  // namespace

std::vector<AbsorptionSet> topology_guided_search(const TannerGraph& g,
                                                  const TopologyRealization& topo,
                                                  int workers) {
    if (topo.a < 1 || topo.a > 12)
        throw std::invalid_argument("topology_guided_search: node count must be in [1,12]");
    std::vector<std::pair<int, int>> es = topo.edges;
    std::sort(es.begin(), es.end());
    if (std::adjacent_find(es.begin(), es.end()) != es.end())
        throw std::invalid_argument("topology_guided_search: topology has a repeated edge");
    for (const auto& e : es)
        if (e.first < 0 || e.second >= topo.a || e.first == e.second)
            throw std::invalid_argument("topology_guided_search: bad topology edge");
    for (const auto& q : topo.quad_checks)
        for (int m : q)
            if (m < 0 || m >= topo.a)
                throw std::invalid_argument("topology_guided_search: bad quad member");
    if (!is_four_cycle_free(g))
        throw std::invalid_argument("topology_guided_search: graph must be 4-cycle free");

    Embedder emb(g, topo);
    int nw = workers > 0 ? workers : omp_get_max_threads();
    std::vector<std::vector<std::vector<int>>> found(static_cast<size_t>(nw));
#pragma omp parallel for schedule(dynamic, 8) num_threads(nw)
    for (int v = 0; v < g.n_vars; ++v)
        emb.search_from_root(v, found[static_cast<size_t>(omp_get_thread_num())]);

    std::set<std::vector<int>> unique;
    for (const auto& per_thread : found)
        for (const auto& s : per_thread) unique.insert(s);

    std::vector<AbsorptionSet> out;
    out.reserve(unique.size());
    for (const auto& s : unique) {
        if (!is_absorption_set(g, s).is_absorption)
            throw std::logic_error("topology_guided_search: verification mismatch");
        out.push_back(analyze_set(g, s));
    }
    return out;
}

ReductionDecision reduction_check(const TannerGraph& g, const AbsorptionSet& s,
                                  const std::vector<int>& remove) {
    std::vector<int> rem = remove;
    std::sort(rem.begin(), rem.end());
    if (std::adjacent_find(rem.begin(), rem.end()) != rem.end())
        throw std::invalid_argument("reduction_check: duplicate removal index");
    if (!std::includes(s.vars.begin(), s.vars.end(), rem.begin(), rem.end()))
        throw std::invalid_argument("reduction_check: removal is not a subset of the set");
    if (rem.size() >= s.vars.size())
        throw std::invalid_argument("reduction_check: cannot remove every node");

    std::vector<int> residual;
    std::set_difference(s.vars.begin(), s.vars.end(), rem.begin(), rem.end(),
                        std::back_inserter(residual));
    ReductionDecision d;
    d.residual = analyze_set(g, residual);
    d.a = d.residual.a;
    d.b = d.residual.b;
    d.is_absorption = is_absorption_set(g, residual).is_absorption;
    return d;
}

ContainmentCounts containment_analysis(const SetCatalog& cat, std::pair<int, int> small_family,
                                       std::pair<int, int> large_family) {
    std::vector<const AbsorptionSet*> small, large;
    for (const auto& e : cat.entries) {
        if (e.set.a == small_family.first && e.set.b == small_family.second) small.push_back(&e.set);
        if (e.set.a == large_family.first && e.set.b == large_family.second) large.push_back(&e.set);
    }
    if (small.empty() || large.empty())
        throw std::invalid_argument("containment_analysis: family missing from catalog");

    std::map<int, std::vector<int>> postings;  // variable -> indices into large
    for (size_t i = 0; i < large.size(); ++i)
        for (int v : large[i]->vars) postings[v].push_back(static_cast<int>(i));

    ContainmentCounts out;
    out.total_small = static_cast<long long>(small.size());
    for (const AbsorptionSet* s : small) {
        const std::vector<int>* best = nullptr;
        for (int v : s->vars) {
            auto it = postings.find(v);
            if (it == postings.end()) {
                best = nullptr;
                break;
            }
            if (!best || it->second.size() < best->size()) best = &it->second;
        }
        bool contained = false;
        if (best)
            for (int idx : *best) {
                const auto& lv = large[static_cast<size_t>(idx)]->vars;
                if (lv != s->vars &&
                    std::includes(lv.begin(), lv.end(), s->vars.begin(), s->vars.end())) {
                    contained = true;
                    break;
                }
            }
        out.contained += contained;
    }
    out.free_standing = out.total_small - out.contained;
    return out;
}

std::string catalog_to_json(const SetCatalog& cat) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : cat.entries) {
        nlohmann::json o;
        o["vars"] = e.set.vars;
        o["a"] = e.set.a;
        o["b"] = e.set.b;
        o["deg_profile"] = e.set.deg_profile;
        o["unsat_checks"] = e.set.unsat_checks;
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

SetCatalog catalog_from_json(const std::string& text) {
    nlohmann::json arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw std::runtime_error("catalog JSON: expected an array");
    SetCatalog cat;
    for (const auto& o : arr) {
        AbsorptionSet s;
        s.vars = o.at("vars").get<std::vector<int>>();
        s.a = o.at("a").get<int>();
        s.b = o.at("b").get<int>();
        s.deg_profile = o.at("deg_profile").get<std::vector<int>>();
        s.unsat_checks = o.at("unsat_checks").get<std::vector<int>>();
        if (!std::is_sorted(s.vars.begin(), s.vars.end()))
            throw std::runtime_error("catalog JSON: vars must be sorted");
        if (static_cast<int>(s.vars.size()) != s.a)
            throw std::runtime_error("catalog JSON: a disagrees with vars");
        if (static_cast<int>(s.deg_profile.size()) != s.a)
            throw std::runtime_error("catalog JSON: deg_profile length disagrees with a");
        if (static_cast<int>(s.unsat_checks.size()) != s.b)
            throw std::runtime_error("catalog JSON: b disagrees with unsat_checks");
        if (!cat.add(std::move(s), "file"))
            throw std::runtime_error("catalog JSON: duplicate variable set");
    }
    cat.finalize();
    return cat;
}

std::string catalog_csv_summary(const SetCatalog& cat) {
    std::map<std::tuple<int, int, std::string>, long long> rows;
    for (const auto& e : cat.entries) ++rows[{e.set.a, e.set.b, e.class_label}];
    std::ostringstream os;
    os << "a,b,class,multiplicity\n";
    for (const auto& r : rows)
        os << std::get<0>(r.first) << "," << std::get<1>(r.first) << "," << std::get<2>(r.first)
           << "," << r.second << "\n";
    return os.str();
}

}  // namespace efloor
