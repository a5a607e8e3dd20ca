#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "efloor/absorption.hpp"
#include "efloor/dynamics.hpp"
#include "efloor/floor.hpp"
#include "efloor/gaussian_de.hpp"
#include "efloor/manifest.hpp"
#include "efloor/simulator.hpp"
#include "efloor/tanner.hpp"
#include "efloor/topology.hpp"

namespace {

using namespace efloor;

// Exit codes: 0 ok, 2 usage/input, 3 cross-input consistency, 4 numeric
// non-convergence.
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunContext {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::map<std::string, std::string> digests;
    std::uint64_t seed = 0;
    std::chrono::steady_clock::time_point t0 =
        std::chrono::steady_clock::now();

    std::string slurp(const std::string& path) {
        std::string s = read_text_file(path);
        digests[path] = digest_hex(fnv1a64(s));
        return s;
    }

    void emit_manifest(const std::string& out_prefix) const {
        RunManifest m;
        m.command = command;
        m.config_json = config.dump();
        m.input_digests = digests;
        m.seed = seed;
        m.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        write_text_file(out_prefix + ".manifest.json", manifest_to_json(m));
    }
};

// Flat-JSON config file: fills any option the command line left untouched.
class Fallback {
  public:
    Fallback(CLI::App* cmd, RunContext& ctx, const std::string& path)
        : cmd_(cmd) {
        if (!path.empty()) cfg_ = nlohmann::json::parse(ctx.slurp(path));
    }

    template <class T>
    void opt(const char* flag, const char* key, T& v) {
        if (!cfg_.is_object()) return;
        if (cfg_.contains(key) && cmd_->count(flag) == 0)
            v = cfg_.at(key).get<T>();
    }

  private:
    CLI::App* cmd_;
    nlohmann::json cfg_;
};

void env_override_int(const char* name, bool flag_given, int& v) {
    if (flag_given) return;
    if (const char* s = std::getenv(name)) v = std::atoi(s);
}

void env_override_ll(const char* name, bool flag_given, long long& v) {
    if (flag_given) return;
    if (const char* s = std::getenv(name)) v = std::atoll(s);
}

std::vector<double> parse_sweep(const std::string& spec) {
    const auto c1 = spec.find(':');
    if (c1 == std::string::npos) return {std::stod(spec)};
    const auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw std::invalid_argument("sweep spec needs start:stop:step");
    const double start = std::stod(spec.substr(0, c1));
    const double stop = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(spec.substr(c2 + 1));
    if (!(step > 0.0) || stop < start)
        throw std::invalid_argument("sweep spec needs stop >= start, step > 0");
    std::vector<double> out;
    for (double x = start; x <= stop + 1e-9; x += step) out.push_back(x);
    return out;
}

std::string join_argv(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

// ---------------------------------------------------------------- search

struct SearchOpts {
    std::string alist, config, out = "search";
    int max_a = 8, a = 0, b = -1, workers = 0;
    bool no_quad = false, brute = false, participation = false;
    int block_size = 0;
    long long work_bound = 400000000LL;
};

int run_search(CLI::App* cmd, SearchOpts& o, RunContext& ctx) {
    Fallback fb(cmd, ctx, o.config);
    fb.opt("--max-a", "max_a", o.max_a);
    fb.opt("--a", "a", o.a);
    fb.opt("--b", "b", o.b);
    fb.opt("--workers", "workers", o.workers);
    fb.opt("--work-bound", "work_bound", o.work_bound);
    env_override_int("EFLOOR_WORKERS", cmd->count("--workers") > 0, o.workers);
    env_override_ll("EFLOOR_WORK_BOUND", cmd->count("--work-bound") > 0,
                    o.work_bound);
    ctx.config = {{"alist", o.alist},       {"max_a", o.max_a},
                  {"a", o.a},               {"b", o.b},
                  {"workers", o.workers},   {"work_bound", o.work_bound},
                  {"quad", !o.no_quad},     {"brute", o.brute},
                  {"participation", o.participation},
                  {"block_size", o.block_size}};

    std::istringstream alist_stream(ctx.slurp(o.alist));
    const TannerGraph g = parse_alist(alist_stream);
    SetCatalog cat;
    if (o.brute) {
        const int cap = o.a > 0 ? o.a : o.max_a;
        cat = brute_force_enumerate(g, cap, o.work_bound);
    } else {
        if (!g.regular)
            throw std::invalid_argument(
                "search: guided mode needs a regular code");
        const int d_v = g.d_v;
        const int lo_a = o.a > 0 ? o.a : 1;
        const int hi_a = o.a > 0 ? o.a : o.max_a;
        const int slack = d_v - d_v / 2 - 1;  // per-node even-degree deficit
        for (int a = lo_a; a <= hi_a; ++a) {
            for (int beff = 0; beff <= a * slack; ++beff) {
                // actual b <= beff with equal parity (a triple-touched odd
                // check converts two touches into none)
                if (o.b >= 0 && (beff < o.b || (beff - o.b) % 2)) continue;
                long long found = 0;
                for (const auto& deg_seq : enumerate_classes(a, beff, d_v)) {
                    const auto topos = enumerate_realizations(
                        deg_seq, !o.no_quad, o.work_bound);
                    for (const TopologyRealization& t : topos)
                        for (AbsorptionSet& s :
                             topology_guided_search(g, t, o.workers)) {
                            ++found;
                            cat.add(std::move(s), "guided-search");
                        }
                }
                std::cerr << "search: a=" << a << " b_eff=" << beff
                          << " embeddings=" << found << "\n";
            }
        }
    }
    cat.finalize();
    if (o.a > 0 || o.b >= 0) {
        SetCatalog filtered;
        for (const CatalogEntry& e : cat.entries) {
            if (o.a > 0 && e.set.a != o.a) continue;
            if (o.b >= 0 && e.set.b != o.b) continue;
            filtered.add(e.set, e.origin);
        }
        filtered.finalize();
        cat = std::move(filtered);
    }

    write_text_file(o.out + ".catalog.json", catalog_to_json(cat));
    write_text_file(o.out + ".summary.csv", catalog_csv_summary(cat));
    if (o.participation) {
        std::ostringstream os;
        const auto mult = cat.multiplicities();
        if (o.block_size > 0) {
            os << "family_a,family_b,block,vars,participation\n";
            for (const auto& [fam, count] : mult) {
                (void)count;
                const auto per_var = cat.participation(fam.first, fam.second);
                std::map<int, long long> per_block;
                for (const auto& [v, c] : per_var)
                    per_block[v / o.block_size] += c;
                for (const auto& [blk, c] : per_block)
                    os << fam.first << ',' << fam.second << ',' << blk << ','
                       << o.block_size << ',' << c << '\n';
            }
        } else {
            os << "family_a,family_b,var,participation\n";
            for (const auto& [fam, count] : mult) {
                (void)count;
                for (const auto& [v, c] :
                     cat.participation(fam.first, fam.second))
                    os << fam.first << ',' << fam.second << ',' << v << ','
                       << c << '\n';
            }
        }
        write_text_file(o.out + ".participation.csv", os.str());
    }
    ctx.emit_manifest(o.out);

    std::cout << "sets: " << cat.entries.size() << "\n";
    for (const auto& [fam, count] : cat.multiplicities())
        std::cout << "(" << fam.first << "," << fam.second << "): " << count
                  << "\n";
    return 0;
}

// --------------------------------------------------- enumerate-topologies

struct TopoOpts {
    std::string config, out = "topologies";
    int a = 0, b = 0, d_v = 6;
    bool no_quad = false;
    long long work_bound = 400000000LL;
};

int run_topologies(CLI::App* cmd, TopoOpts& o, RunContext& ctx) {
    Fallback fb(cmd, ctx, o.config);
    fb.opt("--d-v", "d_v", o.d_v);
    fb.opt("--work-bound", "work_bound", o.work_bound);
    env_override_ll("EFLOOR_WORK_BOUND", cmd->count("--work-bound") > 0,
                    o.work_bound);
    ctx.config = {{"a", o.a},
                  {"b", o.b},
                  {"d_v", o.d_v},
                  {"quad", !o.no_quad},
                  {"work_bound", o.work_bound}};

    std::vector<TopologyRealization> all;
    for (const auto& deg_seq : enumerate_classes(o.a, o.b, o.d_v)) {
        auto topos = enumerate_realizations(deg_seq, !o.no_quad, o.work_bound);
        std::ostringstream klass;
        for (std::size_t i = 0; i < deg_seq.size(); ++i)
            klass << (i ? " " : "") << deg_seq[i];
        std::cout << "class [" << klass.str() << "]: " << topos.size()
                  << " realizations\n";
        for (TopologyRealization& t : topos) {
            t.b = o.b;
            all.push_back(std::move(t));
        }
    }
    std::cout << "total: " << all.size() << "\n";
    write_text_file(o.out + ".json", topologies_to_json(all));
    ctx.emit_manifest(o.out);
    return 0;
}

// -------------------------------------------------------------------- de

struct DeOpts {
    std::string ebno = "3:6:0.25", config, out = "de";
    int iters = 12, d_v = 6, d_c = 32;
    double rate = 1723.0 / 2048.0;
};

int run_de(CLI::App* cmd, DeOpts& o, RunContext& ctx) {
    Fallback fb(cmd, ctx, o.config);
    fb.opt("--ebno", "ebno", o.ebno);
    fb.opt("--iters", "iters", o.iters);
    fb.opt("--d-v", "d_v", o.d_v);
    fb.opt("--d-c", "d_c", o.d_c);
    fb.opt("--rate", "rate", o.rate);
    const std::vector<double> grid = parse_sweep(o.ebno);
    ctx.config = {{"ebno", o.ebno},
                  {"iters", o.iters},
                  {"d_v", o.d_v},
                  {"d_c", o.d_c},
                  {"rate", o.rate}};

    std::ostringstream os;
    os.precision(12);
    os << "ebno_db,iteration,m_v2c,m_ex,g\n";
    for (double ebno : grid) {
        const DEState s =
            evolve_means(o.d_v, o.d_c, intrinsic_llr_mean(ebno, o.rate),
                         o.iters);
        for (int i = 1; i <= o.iters; ++i)
            os << ebno << ',' << i << ',' << s.m_v2c[i - 1] << ','
               << s.m_ex[i - 1] << ',' << s.gains[i - 1] << '\n';
    }
    write_text_file(o.out + ".csv", os.str());
    ctx.emit_manifest(o.out);
    std::cout << "de: " << grid.size() << " points x " << o.iters
              << " iterations -> " << o.out << ".csv\n";
    return 0;
}

// -------------------------------------------------------------- estimate

struct EstimateOpts {
    std::string ebno = "3:6:0.25", families, config, out = "estimate";
    int iters = 12, n = 2048, k_info = 0, d_v = 6, d_c = 32;
    double rate = 1723.0 / 2048.0, llr_clip = 50.0;
    bool no_gains = false, polarity = false, paper_faithful_pp = false;
    bool consistent_variance = false;
};

int run_estimate(CLI::App* cmd, EstimateOpts& o, RunContext& ctx) {
    Fallback fb(cmd, ctx, o.config);
    fb.opt("--ebno", "ebno", o.ebno);
    fb.opt("--iters", "iters", o.iters);
    fb.opt("--rate", "rate", o.rate);
    fb.opt("--n", "n", o.n);
    fb.opt("--k-info", "k_info", o.k_info);
    fb.opt("--d-v", "d_v", o.d_v);
    fb.opt("--d-c", "d_c", o.d_c);
    fb.opt("--llr-clip", "llr_clip", o.llr_clip);

    FloorConfig fc;
    fc.ebno_sweep = parse_sweep(o.ebno);
    fc.iters = o.iters;
    fc.rate = o.rate;
    fc.n = o.n;
    fc.k_info = o.k_info > 0
                    ? o.k_info
                    : static_cast<int>(std::lround(o.n * o.rate));
    fc.d_v = o.d_v;
    fc.d_c = o.d_c;
    fc.llr_clip = o.llr_clip;
    fc.refinements.check_gains = !o.no_gains;
    fc.refinements.polarity_correction = o.polarity;
    fc.refinements.paper_faithful_pp = o.paper_faithful_pp;
    fc.refinements.consistent_variance = o.consistent_variance;
    if (!o.families.empty())
        fc.set_families = families_from_json(ctx.slurp(o.families));
    else
        fc.set_families = {{8, 8, 14272.0, MuSource::lemma, 0.0}};

    ctx.config = {{"ebno", o.ebno},
                  {"iters", fc.iters},
                  {"rate", fc.rate},
                  {"n", fc.n},
                  {"k_info", fc.k_info},
                  {"d_v", fc.d_v},
                  {"d_c", fc.d_c},
                  {"llr_clip", fc.llr_clip},
                  {"check_gains", fc.refinements.check_gains},
                  {"polarity", fc.refinements.polarity_correction},
                  {"paper_faithful_pp", fc.refinements.paper_faithful_pp},
                  {"consistent_variance", fc.refinements.consistent_variance},
                  {"families", nlohmann::json::parse(
                                   families_to_json(fc.set_families))}};

    const FloorEstimate est = sweep(fc);
    write_text_file(o.out + ".csv", floor_csv(est));
    write_text_file(o.out + ".summary.csv", floor_summary_csv(est));
    write_text_file(o.out + ".json", floor_json(est));
    ctx.emit_manifest(o.out);

    for (std::size_t i = 0; i < fc.ebno_sweep.size(); ++i) {
        std::cout << "ebno " << fc.ebno_sweep[i] << " dB: BER " << est.ber[i]
                  << " FER " << est.fer[i] << "\n";
        if (!est.de_growth[i])
            std::cerr << "warning: Eb/N0 " << fc.ebno_sweep[i]
                      << " dB looks below the DE threshold; floor formulas "
                         "are unreliable there\n";
    }
    return 0;
}

// -------------------------------------------------------------- simulate

struct SimulateOpts {
    std::string alist, targets, mode = "mc", shift = "auto", config,
                out = "simulate";
    double ebno = 5.0, frames = 100000, rate = 0.0, llr_clip = 50.0;
    long long target_events = 100;
    int max_iters = 100, window = 8, workers = 0;
    std::uint64_t seed = 1;
    bool min_sum = false;
};

int run_simulate(CLI::App* cmd, SimulateOpts& o, RunContext& ctx) {
    Fallback fb(cmd, ctx, o.config);
    fb.opt("--ebno", "ebno", o.ebno);
    fb.opt("--mode", "mode", o.mode);
    fb.opt("--shift", "shift", o.shift);
    fb.opt("--frames", "frames", o.frames);
    fb.opt("--target-events", "target_events", o.target_events);
    fb.opt("--max-iters", "max_iters", o.max_iters);
    fb.opt("--window", "window", o.window);
    fb.opt("--seed", "seed", o.seed);
    fb.opt("--workers", "workers", o.workers);
    fb.opt("--rate", "rate", o.rate);
    env_override_int("EFLOOR_WORKERS", cmd->count("--workers") > 0, o.workers);

    SimConfig sc;
    sc.ebno_db = o.ebno;
    sc.rate = o.rate;
    sc.max_decoder_iters = o.max_iters;
    sc.max_frames = static_cast<long long>(o.frames);
    sc.target_error_events = o.target_events;
    if (o.mode == "mc")
        sc.mode = SimMode::mc;
    else if (o.mode == "is")
        sc.mode = SimMode::is;
    else
        throw std::invalid_argument("simulate: mode must be mc or is");
    sc.is_shift = o.shift == "auto" ? -1.0 : std::stod(o.shift);
    sc.seed = o.seed;
    sc.workers = o.workers;
    sc.min_sum = o.min_sum;
    sc.llr_clip = o.llr_clip;
    sc.stability_window = o.window;

    std::istringstream alist_stream(ctx.slurp(o.alist));
    const TannerGraph g = parse_alist(alist_stream);
    if (sc.mode == SimMode::is) {
        if (o.targets.empty())
            throw std::invalid_argument("simulate: IS mode needs --targets");
        const SetCatalog cat = catalog_from_json(ctx.slurp(o.targets));
        for (const CatalogEntry& e : cat.entries)
            sc.is_targets.push_back(e.set);
    }

    ctx.seed = sc.seed;
    ctx.config = {{"alist", o.alist},
                  {"ebno_db", sc.ebno_db},
                  {"mode", o.mode},
                  {"targets", o.targets},
                  {"shift", o.shift},
                  {"frames", sc.max_frames},
                  {"target_events", sc.target_error_events},
                  {"max_decoder_iters", sc.max_decoder_iters},
                  {"window", sc.stability_window},
                  {"seed", sc.seed},
                  {"workers", sc.workers},
                  {"min_sum", sc.min_sum},
                  {"rate", sc.rate},
                  {"llr_clip", sc.llr_clip}};

    const SimResult r =
        sc.mode == SimMode::is ? run_is(g, sc) : run_mc(g, sc);
    write_text_file(o.out + ".json", sim_result_to_json(r, sc));
    ctx.emit_manifest(o.out);

    std::cout << "metric,value\n";
    std::cout << "frames," << r.frames << "\n";
    std::cout << "fer," << r.fer << "\n";
    std::cout << "ber," << r.ber << "\n";
    std::cout << "weighted_fer," << r.weighted_fer << "\n";
    if (sc.mode == SimMode::is) {
        std::cout << "union_total," << r.union_total << "\n";
        std::cout << "union_se," << r.union_se << "\n";
        for (const PerSetEstimate& pe : r.per_set)
            std::cout << "set_" << pe.target_index << "_p_hat," << pe.p_hat
                      << "\n";
    }
    for (const std::string& w : r.warnings)
        std::cerr << "warning: " << w << "\n";
    return 0;
}

// ---------------------------------------------------------------- report

struct ReportOpts {
    std::string analytic, is_file, mc_file, out = "report";
};

int run_report(CLI::App*, ReportOpts& o, RunContext& ctx) {
    if (o.analytic.empty() && o.is_file.empty() && o.mc_file.empty())
        throw std::invalid_argument("report: need at least one input");
    ctx.config = {{"analytic", o.analytic},
                  {"is", o.is_file},
                  {"mc", o.mc_file}};

    // Refuse to join results obtained on different codes: compare the alist
    // digests recorded in the inputs' manifests.
    std::set<std::string> alist_digests;
    auto collect = [&](const std::string& json_path) {
        if (json_path.empty()) return;
        std::string base = json_path;
        if (base.size() > 5 && base.substr(base.size() - 5) == ".json")
            base.resize(base.size() - 5);
        const std::string mpath = base + ".manifest.json";
        std::string text;
        try {
            text = read_text_file(mpath);
        } catch (const std::runtime_error&) {
            return;  // no manifest: nothing to check against
        }
        const nlohmann::json m = nlohmann::json::parse(text);
        if (!m.contains("input_digests")) return;
        for (const auto& [path, digest] :
             m.at("input_digests").items()) {
            if (path.size() > 6 &&
                path.substr(path.size() - 6) == ".alist")
                alist_digests.insert(digest.get<std::string>());
        }
    };
    collect(o.is_file);
    collect(o.mc_file);
    if (alist_digests.size() > 1)
        throw ConsistencyError(
            "report: inputs were produced from different codes "
            "(alist digests disagree)");

    struct Row {
        double ebno;
        std::string source, metric;
        double value;
    };
    std::vector<Row> rows;
    if (!o.analytic.empty()) {
        const nlohmann::json j = nlohmann::json::parse(ctx.slurp(o.analytic));
        const auto& grid = j.at("config").at("ebno_sweep");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            rows.push_back({grid[i].get<double>(), "analytic", "ber",
                            j.at("ber")[i].get<double>()});
            rows.push_back({grid[i].get<double>(), "analytic", "fer",
                            j.at("fer")[i].get<double>()});
        }
    }
    auto sim_rows = [&](const std::string& path, const std::string& src) {
        if (path.empty()) return;
        const nlohmann::json j = nlohmann::json::parse(ctx.slurp(path));
        const double ebno = j.at("config").at("ebno_db").get<double>();
        rows.push_back({ebno, src, "ber", j.at("ber").get<double>()});
        rows.push_back({ebno, src, "fer", j.at("fer").get<double>()});
        rows.push_back(
            {ebno, src, "weighted_fer", j.at("weighted_fer").get<double>()});
        if (src == "is")
            rows.push_back(
                {ebno, src, "union_total", j.at("union_total").get<double>()});
    };
    sim_rows(o.is_file, "is");
    sim_rows(o.mc_file, "mc");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& x, const Row& y) {
                         if (x.ebno != y.ebno) return x.ebno < y.ebno;
                         if (x.source != y.source) return x.source < y.source;
                         return x.metric < y.metric;
                     });
    std::ostringstream os;
    os.precision(12);
    os << "ebno_db,source,metric,value\n";
    for (const Row& r : rows)
        os << r.ebno << ',' << r.source << ',' << r.metric << ',' << r.value
           << '\n';
    write_text_file(o.out + ".csv", os.str());
    ctx.emit_manifest(o.out);
    std::cout << "report: " << rows.size() << " rows -> " << o.out
              << ".csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"absorption-set search and error-floor estimation"};
    app.require_subcommand(1);

    SearchOpts so;
    CLI::App* search = app.add_subcommand(
        "search", "find absorption sets in an alist code");
    search->add_option("--alist", so.alist, "parity-check matrix (alist)")
        ->required();
    search->add_option("--max-a", so.max_a, "largest set size to search");
    search->add_option("--a", so.a, "restrict to one set size");
    search->add_option("--b", so.b, "restrict to one unsatisfied-check count");
    search->add_option("--workers", so.workers, "threads (0 = all)");
    search->add_option("--work-bound", so.work_bound, "enumeration budget");
    search->add_flag("--no-quad", so.no_quad, "skip quad-check topologies");
    search->add_flag("--brute", so.brute, "serial subset enumeration instead");
    search->add_flag("--participation", so.participation,
                     "emit per-variable membership counts");
    search->add_option("--block-size", so.block_size,
                       "aggregate participation over blocks of this size");
    search->add_option("--config", so.config, "flat JSON config file");
    search->add_option("--out", so.out, "output prefix");

    TopoOpts to;
    CLI::App* topo = app.add_subcommand("enumerate-topologies",
                                        "list the (a,b) class topologies");
    topo->add_option("--a", to.a, "set size")->required();
    topo->add_option("--b", to.b, "unsatisfied-check budget")->required();
    topo->add_option("--d-v", to.d_v, "variable degree");
    topo->add_flag("--no-quad", to.no_quad, "pairwise attachments only");
    topo->add_option("--work-bound", to.work_bound, "enumeration budget");
    topo->add_option("--config", to.config, "flat JSON config file");
    topo->add_option("--out", to.out, "output prefix");

    DeOpts dopts;
    CLI::App* de = app.add_subcommand("de", "Gaussian density evolution");
    de->add_option("--ebno", dopts.ebno, "dB point or start:stop:step");
    de->add_option("--iters", dopts.iters, "iterations");
    de->add_option("--d-v", dopts.d_v, "variable degree");
    de->add_option("--d-c", dopts.d_c, "check degree");
    de->add_option("--rate", dopts.rate, "code rate");
    de->add_option("--config", dopts.config, "flat JSON config file");
    de->add_option("--out", dopts.out, "output prefix");

    EstimateOpts eo;
    CLI::App* est = app.add_subcommand("estimate", "analytic BER/FER floor");
    est->add_option("--ebno", eo.ebno, "dB point or start:stop:step");
    est->add_option("--iters", eo.iters, "DE iterations");
    est->add_option("--families", eo.families,
                    "JSON list of {a,b,multiplicity,mu}");
    est->add_option("--rate", eo.rate, "code rate");
    est->add_option("--n", eo.n, "code length");
    est->add_option("--k-info", eo.k_info, "information bits (0 = n*rate)");
    est->add_option("--d-v", eo.d_v, "variable degree");
    est->add_option("--d-c", eo.d_c, "check degree");
    est->add_option("--llr-clip", eo.llr_clip,
                    "extrinsic mean saturation (0 disables)");
    est->add_flag("--no-gains", eo.no_gains, "unit check-node gains");
    est->add_flag("--polarity", eo.polarity, "polarity-reversal correction");
    est->add_flag("--paper-faithful-pp", eo.paper_faithful_pp,
                  "polarity sum starts at three errors");
    est->add_flag("--consistent-variance", eo.consistent_variance,
                  "factor-2 reading of the extrinsic variance");
    est->add_option("--config", eo.config, "flat JSON config file");
    est->add_option("--out", eo.out, "output prefix");

    SimulateOpts mo;
    CLI::App* sim = app.add_subcommand("simulate", "BP decoding campaigns");
    sim->add_option("--alist", mo.alist, "parity-check matrix (alist)")
        ->required();
    sim->add_option("--ebno", mo.ebno, "operating point (dB)");
    sim->add_option("--mode", mo.mode, "mc or is");
    sim->add_option("--targets", mo.targets,
                    "catalog JSON of sets to bias toward (is mode)");
    sim->add_option("--shift", mo.shift, "mean shift: auto or a number");
    sim->add_option("--frames", mo.frames, "frame budget (accepts 1e7)");
    sim->add_option("--target-events", mo.target_events,
                    "stop after this many error events");
    sim->add_option("--max-iters", mo.max_iters, "decoder iterations");
    sim->add_option("--window", mo.window, "failure-support stability window");
    sim->add_option("--seed", mo.seed, "RNG seed");
    sim->add_option("--workers", mo.workers, "threads (0 = all)");
    sim->add_option("--rate", mo.rate, "rate override (0 = design rate)");
    sim->add_flag("--min-sum", mo.min_sum, "min-sum check update");
    sim->add_option("--config", mo.config, "flat JSON config file");
    sim->add_option("--out", mo.out, "output prefix");

    ReportOpts ro;
    CLI::App* rep = app.add_subcommand(
        "report", "join analytic/IS/MC outputs into one table");
    rep->add_option("--analytic", ro.analytic, "estimate JSON");
    rep->add_option("--is", ro.is_file, "IS simulate JSON");
    rep->add_option("--mc", ro.mc_file, "MC simulate JSON");
    rep->add_option("--out", ro.out, "output prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    RunContext ctx;
    ctx.command = join_argv(argc, argv);
    try {
        if (*search) return run_search(search, so, ctx);
        if (*topo) return run_topologies(topo, to, ctx);
        if (*de) return run_de(de, dopts, ctx);
        if (*est) return run_estimate(est, eo, ctx);
        if (*sim) return run_simulate(sim, mo, ctx);
        if (*rep) return run_report(rep, ro, ctx);
    } catch (const ConsistencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: bad JSON input: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        if (msg.find("converg") != std::string::npos ||
            msg.find("bracket") != std::string::npos)
            return 4;
        return 2;
    }
    return 0;
}
