#include "efloor/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace efloor {

namespace {

// The three ways to split a quad check's four edge slots into two swaps.
constexpr int kQuadPairings[3][4] = {{1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};

std::vector<double> compose_vc(const std::vector<double>& v_op, const std::vector<int>& routing,
                               int dim) {
    // (VC)[e][f] = V[e][routing(f)] since C maps slot f onto its partner.
    std::vector<double> vc(static_cast<size_t>(dim) * dim, 0.0);
    for (int e = 0; e < dim; ++e)
        for (int f = 0; f < dim; ++f)
            vc[static_cast<size_t>(e) * dim + f] = v_op[static_cast<size_t>(e) * dim + routing[f]];
    return vc;
}

EigenResult power_iterate(const std::vector<double>& vc, int dim, double tol) {
    std::vector<double> v(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    std::vector<double> w(dim);
    EigenResult r;
    const int max_iters = 10000;
    for (int it = 1; it <= max_iters; ++it) {
        // Identity shift keeps periodic routings from oscillating.
        for (int i = 0; i < dim; ++i) {
            double acc = v[i];
            const double* row = &vc[static_cast<size_t>(i) * dim];
            for (int j = 0; j < dim; ++j) acc += row[j] * v[j];
            w[i] = acc;
        }
        double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
        if (norm == 0.0) throw std::runtime_error("dominant_eigen: iterate collapsed to zero");
        for (int i = 0; i < dim; ++i) v[i] = w[i] / norm;

        double mu = 0.0;
        for (int i = 0; i < dim; ++i) {
            double acc = 0.0;
            const double* row = &vc[static_cast<size_t>(i) * dim];
            for (int j = 0; j < dim; ++j) acc += row[j] * v[j];
            w[i] = acc;
            mu += v[i] * acc;
        }
        double resid = 0.0;
        for (int i = 0; i < dim; ++i) resid = std::max(resid, std::abs(w[i] - mu * v[i]));
        if (resid <= tol * std::abs(mu)) {
            if (std::accumulate(v.begin(), v.end(), 0.0) < 0.0)
                for (double& x : v) x = -x;
            r.mu_max = mu;
            r.v_max = v;
            r.iterations = it;
            r.residual = resid;
            return r;
        }
        r.residual = resid;
        r.iterations = it;
    }
    std::ostringstream os;
    os << "dominant_eigen: no convergence after " << max_iters
       << " iterations, residual=" << r.residual;
    throw std::runtime_error(os.str());
}

std::vector<double> onto_edges(const InternalModel& m, const std::vector<double>& per_member) {
    std::vector<double> x(m.dim);
    for (int e = 0; e < m.dim; ++e) x[e] = per_member[m.edge_index[e].first];
    return x;
}

const std::vector<double>& injection(const DynamicsInput& in, int j,
                                     const std::vector<double>& zeros) {
    if (in.lambda_ex.empty()) return zeros;
    return in.lambda_ex[static_cast<size_t>(j) - 1];
}

void validate_input(const InternalModel& m, const DynamicsInput& in) {
    if (in.iters < 0) throw std::invalid_argument("dynamics input: iters must be >= 0");
    if (static_cast<int>(in.lambda.size()) != m.set.a)
        throw std::invalid_argument("dynamics input: lambda length must equal a");
    if (!in.lambda_ex.empty()) {
        if (static_cast<int>(in.lambda_ex.size()) < in.iters)
            throw std::invalid_argument("dynamics input: lambda_ex shorter than iters");
        for (const auto& row : in.lambda_ex)
            if (static_cast<int>(row.size()) != m.set.a)
                throw std::invalid_argument("dynamics input: lambda_ex row length must equal a");
    }
}

}  // namespace

double approx_gain(int a, int b, int d_v) {
    if (a < 1) throw std::invalid_argument("approx_gain: a must be >= 1");
    return (d_v - 1) - static_cast<double>(b) / a;
}

InternalModel build_model(const TannerGraph& g, const AbsorptionSet& s, bool force) {
    if (!force && !is_absorption_set(g, s.vars).is_absorption)
        throw std::invalid_argument("build_model: not an absorption set (use force for toys)");

    InternalModel m;
    m.set = s;
    const int a = s.a;

    std::vector<std::vector<int>> internal(a);  // even-connected checks per member
    std::vector<std::vector<int>> quad_edges;   // edge slots of each quad check
    for (const auto& sc : s.sat_checks)
        if (sc.second > 4)
            throw std::invalid_argument("build_model: unsupported check multiplicity " +
                                        std::to_string(sc.second));
    for (int i = 0; i < a; ++i)
        for (const auto& sc : s.sat_checks)
            if (std::binary_search(g.var_adj[s.vars[i]].begin(), g.var_adj[s.vars[i]].end(),
                                   sc.first))
                internal[i].push_back(sc.first);

    for (int i = 0; i < a; ++i) {
        if (internal[i].empty())
            throw std::invalid_argument("build_model: member with no internal checks");
        if (internal[i].size() == 1) {
            if (!force)
                throw std::invalid_argument("build_model: member of degree 1 needs force");
            m.degenerate_passthrough = true;
        }
        for (int c : internal[i]) m.edge_index.push_back({i, c});
    }
    m.dim = static_cast<int>(m.edge_index.size());

    // Slots of each internal check, in edge-index order.
    std::map<int, std::vector<int>> slots;
    for (int e = 0; e < m.dim; ++e) slots[m.edge_index[e].second].push_back(e);

    m.v_op.assign(static_cast<size_t>(m.dim) * m.dim, 0.0);
    for (int e = 0; e < m.dim; ++e) {
        int member = m.edge_index[e].first;
        bool solo = true;
        for (int f = 0; f < m.dim; ++f)
            if (f != e && m.edge_index[f].first == member) {
                m.v_op[static_cast<size_t>(e) * m.dim + f] = 1.0;
                solo = false;
            }
        if (solo) m.v_op[static_cast<size_t>(e) * m.dim + e] = 1.0;  // degenerate pass-through
    }

    std::vector<int> base_routing(m.dim, -1);
    std::vector<const std::vector<int>*> quads;
    for (const auto& kv : slots) {
        if (kv.second.size() == 2) {
            base_routing[kv.second[0]] = kv.second[1];
            base_routing[kv.second[1]] = kv.second[0];
        } else if (kv.second.size() == 4) {
            quads.push_back(&kv.second);
        } else {
            throw std::logic_error("build_model: internal check with odd slot count");
        }
    }

    // Try every combination of 2-swap pairings across quad checks and keep
    // the routing with the largest dominant eigenvalue.
    int combos = 1;
    for (size_t q = 0; q < quads.size(); ++q) combos *= 3;
    double best_mu = -1.0;
    for (int combo = 0; combo < combos; ++combo) {
        std::vector<int> routing = base_routing;
        int rest = combo;
        for (const auto* q : quads) {
            const int* pairing = kQuadPairings[rest % 3];
            rest /= 3;
            for (int i = 0; i < 4; ++i) routing[(*q)[i]] = (*q)[pairing[i]];
        }
        std::vector<double> vc = compose_vc(m.v_op, routing, m.dim);
        EigenResult er = power_iterate(vc, m.dim, 1e-10);
        if (er.mu_max > best_mu) {
            best_mu = er.mu_max;
            m.routing = std::move(routing);
            m.vc = std::move(vc);
            m.mu_max = er.mu_max;
            m.v_max = std::move(er.v_max);
        }
    }
    m.quad_routing_heuristic = !quads.empty();
    m.approx_gain = approx_gain(s.a, s.b, g.d_v);
    return m;
}

EigenResult dominant_eigen(const InternalModel& m, double tol) {
    if (m.dim == 0) throw std::invalid_argument("dominant_eigen: empty model");
    return power_iterate(m.vc, m.dim, tol);
}

double failure_statistic(const InternalModel& m, const DynamicsInput& in) {
    validate_input(m, in);
    std::vector<double> lam = onto_edges(m, in.lambda);
    double lam_v = std::inner_product(lam.begin(), lam.end(), m.v_max.begin(), 0.0);
    double beta = lam_v;
    std::vector<double> zeros(m.set.a, 0.0);
    double mu_pow = 1.0;
    for (int j = 1; j <= in.iters; ++j) {
        mu_pow *= m.mu_max;
        std::vector<double> ex = onto_edges(m, injection(in, j, zeros));
        double num = lam_v;
        for (int e = 0; e < m.dim; ++e) num += ex[e] * m.v_max[e];
        beta += num / mu_pow;
    }
    return beta;
}

std::vector<std::vector<double>> simulate_linear_iterations(const InternalModel& m,
                                                            const DynamicsInput& in) {
    validate_input(m, in);
    std::vector<double> lam = onto_edges(m, in.lambda);
    std::vector<std::vector<double>> traj;
    traj.push_back(lam);
    std::vector<double> zeros(m.set.a, 0.0);
    for (int i = 1; i <= in.iters; ++i) {
        const std::vector<double>& prev = traj.back();
        std::vector<double> ex = onto_edges(m, injection(in, i, zeros));
        std::vector<double> next(m.dim, 0.0);
        for (int e = 0; e < m.dim; ++e) {
            double acc = lam[e] + ex[e];
            const double* row = &m.vc[static_cast<size_t>(e) * m.dim];
            for (int f = 0; f < m.dim; ++f) acc += row[f] * prev[f];
            next[e] = acc;
        }
        traj.push_back(std::move(next));
    }
    return traj;
}

std::string model_to_json(const InternalModel& m) {
    nlohmann::json o;
    nlohmann::json ei = nlohmann::json::array();
    for (const auto& e : m.edge_index) ei.push_back({e.first, e.second});
    o["edge_index"] = std::move(ei);
    nlohmann::json trip = nlohmann::json::array();
    for (int r = 0; r < m.dim; ++r)
        for (int c = 0; c < m.dim; ++c) {
            double v = m.vc[static_cast<size_t>(r) * m.dim + c];
            if (v != 0.0) trip.push_back({r, c, v});
        }
    o["vc"] = std::move(trip);
    o["mu_max"] = m.mu_max;
    o["v_max"] = m.v_max;
    o["approx_gain"] = m.approx_gain;
    o["quad_routing_heuristic"] = m.quad_routing_heuristic;
    o["degenerate_passthrough"] = m.degenerate_passthrough;
    return o.dump(2) + "\n";
}

}  // namespace efloor
