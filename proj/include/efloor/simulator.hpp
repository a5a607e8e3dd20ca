#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "efloor/absorption.hpp"
#include "efloor/tanner.hpp"

namespace efloor {

enum class SimMode { mc, is };

struct SimConfig {
    double ebno_db = 5.0;
    double rate = 0.0;  // <= 0: design rate (n - m)/n
    int max_decoder_iters = 100;
    long long max_frames = 100000;
    long long target_error_events = 100;
    SimMode mode = SimMode::mc;
    std::vector<AbsorptionSet> is_targets;
    double is_shift = -1.0;  // < 0: auto = channel mean (bias to the boundary)
    std::uint64_t seed = 1;
    int workers = 1;
    bool min_sum = false;
    double llr_clip = 50.0;
    int stability_window = 8;
};

struct DecodeOutcome {
    bool converged = false;  // syndrome exactly zero
    int iterations = 0;
    std::vector<std::uint8_t> decisions;
    std::vector<std::vector<int>> trace;  // hard-decision support per iteration
};

// Tanh-domain sum-product (or min-sum) with reusable message buffers.
class Decoder {
  public:
    Decoder(const TannerGraph& g, bool min_sum = false, double llr_clip = 50.0);
    const DecodeOutcome& run(const std::vector<double>& llr, int max_iters);

  private:
    const TannerGraph& g_;
    bool min_sum_;
    double clip_;
    std::vector<int> var_off_, chk_off_;   // CSR offsets, var-major edge ids
    std::vector<int> chk_edges_;           // edge ids grouped by check
    std::vector<int> edge_var_;
    std::vector<double> q_, r_, sum_r_, total_;
    DecodeOutcome out_;
};

// One-shot wrapper.
DecodeOutcome decode_sum_product(const TannerGraph& g,
                                 const std::vector<double>& llr, int max_iters,
                                 bool min_sum = false, double llr_clip = 50.0);

struct FailureSupport {
    std::vector<int> support;  // bits wrong in every one of the last W trips
    bool classified = false;   // nonempty support
    bool is_absorption = false;
};

FailureSupport identify_failure_support(
    const TannerGraph& g, const std::vector<std::vector<int>>& trace,
    int stability_window);

struct PerSetEstimate {
    int target_index = 0;
    int a = 0;
    int b = 0;
    long long frames = 0;
    long long hits = 0;      // failures whose support equals the target
    double p_hat = 0.0;      // weighted, unbiased for P(lock on this set)
    double std_err = 0.0;
};

struct SimResult {
    long long frames = 0;
    long long bit_errors = 0;
    long long frame_errors = 0;
    double ber = 0.0;
    double fer = 0.0;
    // Weighted any-failure estimate; equals fer with unit weights (MC).
    double weighted_fer = 0.0;
    double weighted_fer_se = 0.0;
    double rse = 0.0;  // relative standard error of the headline estimate
    std::vector<PerSetEstimate> per_set;
    double union_total = 0.0;  // sum of per-set gated estimates
    double union_se = 0.0;     // root-sum-square of per-set errors
    // Failure-class histogram keyed "(a,b)"; non-absorption stable supports
    // keyed "other"; oscillating failures "unclassified".
    std::map<std::string, long long> identified;
    std::vector<std::string> warnings;
};

SimResult run_mc(const TannerGraph& g, const SimConfig& config);
SimResult run_is(const TannerGraph& g, const SimConfig& config);

std::string sim_result_to_json(const SimResult& r, const SimConfig& config);

}  // namespace efloor
