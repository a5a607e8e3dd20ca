#include <omp.h>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "efloor/absorption.hpp"
#include "efloor/simulator.hpp"
#include "efloor/tanner.hpp"
#include "efloor/topology.hpp"

namespace {

using namespace efloor;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// (3,6) array code: 3 x 6 blocks of p x p circulants, block (i,j) shifted by
// i*j mod p. For prime p this is 4-cycle free.
TannerGraph array_code(int p) {
    QcBlockSpec spec;
    spec.rows = 3;
    spec.cols = 6;
    spec.block_size = p;
    spec.perms.assign(3, std::vector<std::vector<int>>(
                             6, std::vector<int>(p, 0)));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 6; ++j)
            for (int t = 0; t < p; ++t)
                spec.perms[i][j][t] = (t + i * j) % p;
    return expand_qc(spec);
}

std::set<std::vector<int>> var_tuples(const std::vector<AbsorptionSet>& sets) {
    std::set<std::vector<int>> out;
    for (const AbsorptionSet& s : sets) out.insert(s.vars);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel benchmark on a (3,6) array code"};
    int p = 97;
    int a = 6;
    int workers = 0;
    long long frames = 20000;
    double ebno = 2.0;
    std::uint64_t seed = 7;
    app.add_option("--p", p, "circulant size (prime)");
    app.add_option("--a", a, "set size for the search benchmark");
    app.add_option("--workers", workers, "parallel thread count (0 = all)");
    app.add_option("--frames", frames, "simulator frame budget");
    app.add_option("--ebno", ebno, "simulator operating point (dB)");
    app.add_option("--seed", seed, "simulator seed");
    CLI11_PARSE(app, argc, argv);
    if (workers <= 0) workers = omp_get_max_threads();

    const TannerGraph g = array_code(p);
    std::cout << "code: n=" << g.n_vars << " m=" << g.n_checks << " (d_v="
              << g.d_v << ", d_c=" << g.d_c << "), 4-cycle-free="
              << (is_four_cycle_free(g) ? "yes" : "no") << "\n";
    std::cout << "threads: 1 vs " << workers << "\n\n";

    // --- topology-guided search ------------------------------------------
    std::vector<TopologyRealization> topos;
    for (int beff = 0; beff <= a; ++beff)
        for (const auto& deg_seq : enumerate_classes(a, beff, g.d_v))
            for (TopologyRealization& t : enumerate_realizations(deg_seq))
                topos.push_back(std::move(t));
    std::cout << "search: a=" << a << ", " << topos.size()
              << " topologies\n";

    auto run_search = [&](int w) {
        std::vector<AbsorptionSet> all;
        for (const TopologyRealization& t : topos)
            for (AbsorptionSet& s : topology_guided_search(g, t, w))
                all.push_back(std::move(s));
        return all;
    };

    Clock::time_point t0 = Clock::now();
    const auto serial_sets = run_search(1);
    const double search_serial = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel_sets = run_search(workers);
    const double search_parallel = seconds_since(t0);

    const bool search_same =
        var_tuples(serial_sets) == var_tuples(parallel_sets);
    std::cout << "  serial   " << search_serial << " s, "
              << serial_sets.size() << " embeddings\n";
    std::cout << "  parallel " << search_parallel << " s, "
              << parallel_sets.size() << " embeddings\n";
    std::cout << "  speedup  " << search_serial / search_parallel
              << "x, identical results: " << (search_same ? "yes" : "NO")
              << "\n\n";

    // --- decoder campaign -------------------------------------------------
    SimConfig sc;
    sc.ebno_db = ebno;
    sc.max_decoder_iters = 50;
    sc.max_frames = frames;
    sc.target_error_events = frames + 1;  // never stop early
    sc.seed = seed;
    std::cout << "simulate: mc, " << frames << " frames at " << ebno
              << " dB\n";

    sc.workers = 1;
    t0 = Clock::now();
    const SimResult r1 = run_mc(g, sc);
    const double sim_serial = seconds_since(t0);
    sc.workers = workers;
    t0 = Clock::now();
    const SimResult rn = run_mc(g, sc);
    const double sim_parallel = seconds_since(t0);

    const bool sim_same = r1.frames == rn.frames &&
                          r1.bit_errors == rn.bit_errors &&
                          r1.frame_errors == rn.frame_errors;
    std::cout << "  serial   " << sim_serial << " s, fer=" << r1.fer << "\n";
    std::cout << "  parallel " << sim_parallel << " s, fer=" << rn.fer
              << "\n";
    std::cout << "  speedup  " << sim_serial / sim_parallel
              << "x, identical results: " << (sim_same ? "yes" : "NO")
              << "\n";

    return search_same && sim_same ? 0 : 1;
}
