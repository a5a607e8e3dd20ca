#include "efloor/simulator.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "efloor/rng.hpp"
#include "json.hpp"

namespace efloor {

namespace {

double clamp_mag(double x, double m) { return std::max(-m, std::min(m, x)); }

double resolve_rate(const TannerGraph& g, const SimConfig& c) {
    double rate = c.rate;
    if (rate <= 0.0)
        rate = static_cast<double>(g.n_vars - g.n_checks) / g.n_vars;
    if (!(rate > 0.0) || rate >= 1.0)
        throw std::invalid_argument("simulator: rate outside (0, 1)");
    return rate;
}

}  // namespace

Decoder::Decoder(const TannerGraph& g, bool min_sum, double llr_clip)
    : g_(g), min_sum_(min_sum), clip_(llr_clip) {
    const int n = g.n_vars, m = g.n_checks;
    var_off_.assign(n + 1, 0);
    for (int i = 0; i < n; ++i)
        var_off_[i + 1] = var_off_[i] + g.var_degree(i);
    const int edges = var_off_[n];
    edge_var_.resize(edges);
    chk_off_.assign(m + 1, 0);
    for (int c = 0; c < m; ++c)
        chk_off_[c + 1] = chk_off_[c] + g.chk_degree(c);
    chk_edges_.resize(edges);
    std::vector<int> fill(chk_off_.begin(), chk_off_.end() - 1);
    for (int i = 0; i < n; ++i) {
        int e = var_off_[i];
        for (int c : g.var_adj[i]) {
            edge_var_[e] = i;
            chk_edges_[fill[c]++] = e;
            ++e;
        }
    }
    q_.resize(edges);
    r_.resize(edges);
    sum_r_.resize(n);
    total_.resize(n);
}

const DecodeOutcome& Decoder::run(const std::vector<double>& llr,
                                  int max_iters) {
    const int n = g_.n_vars, m = g_.n_checks;
    if (static_cast<int>(llr.size()) != n)
        throw std::invalid_argument("decode: LLR length mismatch");
    std::fill(r_.begin(), r_.end(), 0.0);
    std::fill(sum_r_.begin(), sum_r_.end(), 0.0);
    out_.converged = false;
    out_.iterations = 0;
    out_.trace.clear();
    out_.decisions.assign(n, 0);

    double fwd[64], mag[64];
    for (int iter = 1; iter <= max_iters; ++iter) {
        for (int i = 0; i < n; ++i) {
            const double base = llr[i] + sum_r_[i];
            for (int e = var_off_[i]; e < var_off_[i + 1]; ++e)
                q_[e] = clamp_mag(base - r_[e], clip_);
        }
        for (int c = 0; c < m; ++c) {
            const int lo = chk_off_[c], deg = chk_off_[c + 1] - lo;
            if (min_sum_) {
                int neg = 0, idx1 = -1;
                double m1 = 1e300, m2 = 1e300;
                for (int k = 0; k < deg; ++k) {
                    const double v = q_[chk_edges_[lo + k]];
                    if (v < 0.0) ++neg;
                    const double av = std::abs(v);
                    if (av < m1) {
                        m2 = m1;
                        m1 = av;
                        idx1 = k;
                    } else if (av < m2) {
                        m2 = av;
                    }
                }
                for (int k = 0; k < deg; ++k) {
                    const int e = chk_edges_[lo + k];
                    const double v = q_[e];
                    const bool vneg = v < 0.0;
                    const int sgn = ((neg - (vneg ? 1 : 0)) & 1) ? -1 : 1;
                    const double mg = (k == idx1) ? m2 : m1;
                    r_[e] = clamp_mag(sgn * mg, clip_);
                }
            } else {
                double p = 1.0;
                for (int k = 0; k < deg; ++k) {
                    fwd[k] = p;
                    mag[k] = std::tanh(0.5 * q_[chk_edges_[lo + k]]);
                    p *= mag[k];
                }
                double bwd = 1.0;
                for (int k = deg - 1; k >= 0; --k) {
                    const double excl =
                        clamp_mag(fwd[k] * bwd, 1.0 - 1e-15);
                    r_[chk_edges_[lo + k]] =
                        clamp_mag(2.0 * std::atanh(excl), clip_);
                    bwd *= mag[k];
                }
            }
        }
        std::vector<int> support;
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int e = var_off_[i]; e < var_off_[i + 1]; ++e) s += r_[e];
            sum_r_[i] = s;
            total_[i] = llr[i] + s;
            out_.decisions[i] = total_[i] < 0.0 ? 1 : 0;
            if (out_.decisions[i]) support.push_back(i);
        }
        out_.trace.push_back(std::move(support));
        out_.iterations = iter;
        bool clean = true;
        for (int c = 0; c < m && clean; ++c) {
            int parity = 0;
            for (int e = chk_off_[c]; e < chk_off_[c + 1]; ++e)
                parity ^= out_.decisions[edge_var_[chk_edges_[e]]];
            clean = parity == 0;
        }
        if (clean) {
            out_.converged = true;
            break;
        }
    }
    return out_;
}

DecodeOutcome decode_sum_product(const TannerGraph& g,
                                 const std::vector<double>& llr, int max_iters,
                                 bool min_sum, double llr_clip) {
    Decoder d(g, min_sum, llr_clip);
    return d.run(llr, max_iters);
}

FailureSupport identify_failure_support(
    const TannerGraph& g, const std::vector<std::vector<int>>& trace,
    int stability_window) {
    FailureSupport fs;
    if (trace.empty() || stability_window < 1) return fs;
    const int w = std::min<int>(stability_window, trace.size());
    fs.support = trace[trace.size() - w];
    std::vector<int> tmp;
    for (std::size_t t = trace.size() - w + 1; t < trace.size(); ++t) {
        tmp.clear();
        std::set_intersection(fs.support.begin(), fs.support.end(),
                              trace[t].begin(), trace[t].end(),
                              std::back_inserter(tmp));
        fs.support.swap(tmp);
        if (fs.support.empty()) return fs;
    }
    fs.classified = !fs.support.empty();
    if (fs.classified)
        fs.is_absorption = is_absorption_set(g, fs.support).is_absorption;
    return fs;
}

namespace {

struct FrameRecord {
    double w = 1.0;
    int bit_errs = 0;
    std::uint8_t failed = 0, gated = 0, classified = 0, absorption = 0;
    int ab_a = 0, ab_b = 0;
};

struct Campaign {
    const AbsorptionSet* target = nullptr;  // null for plain MC
    int target_index = -1;
    double shift = 0.0;
    std::uint64_t stream = 0;
    long long budget = 0;
};

SimResult run_engine(const TannerGraph& g, const SimConfig& config,
                     bool importance) {
    const int n = g.n_vars;
    const double rate = resolve_rate(g, config);
    const double sigma2 =
        1.0 / (2.0 * rate * std::pow(10.0, config.ebno_db / 10.0));
    const double sigma = std::sqrt(sigma2);
    const double llr_scale = 2.0 / sigma2;
    if (config.max_frames < 1)
        throw std::invalid_argument("simulator: max_frames < 1");

    SimResult res;
    std::vector<Campaign> campaigns;
    if (importance) {
        if (config.is_targets.empty())
            throw std::invalid_argument("simulator: IS mode needs targets");
        const double shift = config.is_shift < 0.0 ? 1.0 : config.is_shift;
        if (shift == 0.0)
            res.warnings.push_back(
                "zero mean shift: weights degenerate to 1 (plain MC)");
        const long long budget = std::max<long long>(
            1, config.max_frames /
                   static_cast<long long>(config.is_targets.size()));
        for (std::size_t t = 0; t < config.is_targets.size(); ++t) {
            Campaign c;
            c.target = &config.is_targets[t];
            c.target_index = static_cast<int>(t);
            c.shift = shift;
            c.stream = t;
            c.budget = budget;
            campaigns.push_back(c);
        }
        for (const AbsorptionSet& s : config.is_targets)
            for (int v : s.vars)
                if (v < 0 || v >= n)
                    throw std::invalid_argument(
                        "simulator: target variable out of range");
    } else {
        campaigns.push_back({nullptr, -1, 0.0, 0, config.max_frames});
    }

    int workers = config.workers;
    if (workers <= 0) workers = omp_get_max_threads();
    std::vector<std::unique_ptr<Decoder>> decoders;
    decoders.reserve(workers);
    for (int t = 0; t < workers; ++t)
        decoders.push_back(
            std::make_unique<Decoder>(g, config.min_sum, config.llr_clip));

    const long long block = 2048;
    double pool_sw = 0.0, pool_sw2 = 0.0;

    for (const Campaign& camp : campaigns) {
        std::vector<std::uint8_t> biased(n, 0);
        if (camp.target)
            for (int v : camp.target->vars) biased[v] = 1;

        long long frames = 0, hits = 0;
        double sw_g = 0.0, sw2_g = 0.0;
        std::vector<FrameRecord> records;

        while (frames < camp.budget && hits < config.target_error_events) {
            const long long cur = std::min(block, camp.budget - frames);
            records.assign(cur, FrameRecord{});

#pragma omp parallel num_threads(workers)
            {
                const int tid = omp_get_thread_num();
                std::vector<double> llr(n);
#pragma omp for schedule(static)
                for (long long f = 0; f < cur; ++f) {
                    CounterRng rng(config.seed, camp.stream,
                                   static_cast<std::uint64_t>(frames + f));
                    double ln_w = 0.0;
                    for (int i = 0; i < n; ++i) {
                        const double z = rng.normal();
                        const double mean = biased[i] ? 1.0 - camp.shift : 1.0;
                        const double y = mean + sigma * z;
                        llr[i] = llr_scale * y;
                        if (biased[i])
                            ln_w += (camp.shift * (y - 1.0) +
                                     0.5 * camp.shift * camp.shift) /
                                    sigma2;
                    }
                    const DecodeOutcome& out =
                        decoders[tid]->run(llr, config.max_decoder_iters);
                    FrameRecord& rec = records[f];
                    rec.w = std::exp(ln_w);
                    for (std::uint8_t d : out.decisions) rec.bit_errs += d;
                    rec.failed = (!out.converged || rec.bit_errs > 0) ? 1 : 0;
                    if (rec.failed) {
                        const FailureSupport fs = identify_failure_support(
                            g, out.trace, config.stability_window);
                        rec.classified = fs.classified ? 1 : 0;
                        rec.absorption = fs.is_absorption ? 1 : 0;
                        if (fs.classified) {
                            const AbsorptionSet an =
                                analyze_set(g, fs.support);
                            rec.ab_a = an.a;
                            rec.ab_b = an.b;
                        }
                        if (camp.target)
                            rec.gated =
                                (fs.classified &&
                                 fs.support == camp.target->vars)
                                    ? 1
                                    : 0;
                        else
                            rec.gated = 1;
                    }
                }
            }

            for (long long f = 0; f < cur; ++f) {
                const FrameRecord& rec = records[f];
                res.bit_errors += rec.bit_errs;
                if (rec.failed) {
                    ++res.frame_errors;
                    std::string key = "unclassified";
                    if (rec.classified) {
                        if (rec.absorption)
                            key = "(" + std::to_string(rec.ab_a) + "," +
                                  std::to_string(rec.ab_b) + ")";
                        else
                            key = "other";
                    }
                    ++res.identified[key];
                }
                if (rec.gated) ++hits;
                const double xg = rec.gated ? rec.w : 0.0;
                sw_g += xg;
                sw2_g += xg * xg;
                const double xf = rec.failed ? rec.w : 0.0;
                pool_sw += xf;
                pool_sw2 += xf * xf;
            }
            frames += cur;
        }

        res.frames += frames;
        if (camp.target) {
            PerSetEstimate pe;
            pe.target_index = camp.target_index;
            pe.a = camp.target->a;
            pe.b = camp.target->b;
            pe.frames = frames;
            pe.hits = hits;
            pe.p_hat = sw_g / frames;
            if (frames > 1) {
                const double s2 =
                    std::max(0.0, (sw2_g - sw_g * sw_g / frames) /
                                      (frames - 1));
                pe.std_err = std::sqrt(s2 / frames);
            }
            res.per_set.push_back(pe);
            res.union_total += pe.p_hat;
            res.union_se += pe.std_err * pe.std_err;
        }
    }

    res.union_se = std::sqrt(res.union_se);
    res.ber = static_cast<double>(res.bit_errors) / (static_cast<double>(res.frames) * n);
    res.fer = static_cast<double>(res.frame_errors) / res.frames;
    res.weighted_fer = pool_sw / res.frames;
    if (res.frames > 1) {
        const double s2 = std::max(
            0.0, (pool_sw2 - pool_sw * pool_sw / res.frames) / (res.frames - 1));
        res.weighted_fer_se = std::sqrt(s2 / res.frames);
    }
    const double headline = importance ? res.union_total : res.fer;
    const double headline_se = importance ? res.union_se : res.weighted_fer_se;
    res.rse = headline > 0.0 ? headline_se / headline : 0.0;
    return res;
}

}  // namespace

SimResult run_mc(const TannerGraph& g, const SimConfig& config) {
    return run_engine(g, config, false);
}

SimResult run_is(const TannerGraph& g, const SimConfig& config) {
    return run_engine(g, config, true);
}

std::string sim_result_to_json(const SimResult& r, const SimConfig& config) {
    nlohmann::json j;
    j["config"] = {
        {"ebno_db", config.ebno_db},
        {"rate", config.rate},
        {"max_decoder_iters", config.max_decoder_iters},
        {"max_frames", config.max_frames},
        {"target_error_events", config.target_error_events},
        {"mode", config.mode == SimMode::is ? "is" : "mc"},
        {"is_shift", config.is_shift},
        {"seed", config.seed},
        {"workers", config.workers},
        {"min_sum", config.min_sum},
        {"llr_clip", config.llr_clip},
        {"stability_window", config.stability_window},
        {"targets", config.is_targets.size()},
    };
    j["frames"] = r.frames;
    j["bit_errors"] = r.bit_errors;
    j["frame_errors"] = r.frame_errors;
    j["ber"] = r.ber;
    j["fer"] = r.fer;
    j["weighted_fer"] = r.weighted_fer;
    j["weighted_fer_se"] = r.weighted_fer_se;
    j["rse"] = r.rse;
    j["union_total"] = r.union_total;
    j["union_se"] = r.union_se;
    j["per_set"] = nlohmann::json::array();
    for (const PerSetEstimate& pe : r.per_set)
        j["per_set"].push_back({{"target_index", pe.target_index},
                                {"a", pe.a},
                                {"b", pe.b},
                                {"frames", pe.frames},
                                {"hits", pe.hits},
                                {"p_hat", pe.p_hat},
                                {"std_err", pe.std_err}});
    j["identified"] = r.identified;
    j["warnings"] = r.warnings;
    return j.dump(2);
}

}  // namespace efloor
