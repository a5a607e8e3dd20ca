#pragma once

#include <functional>
#include <string>
#include <vector>

#include "efloor/gaussian_de.hpp"

namespace efloor {

// Gain source for a set family, in precedence order: the exact d_v - 2 value
// for symmetric pairwise sets, a numerically computed eigenvalue, or the
// (d_v - 1) - b/a approximation.
enum class MuSource { lemma, numeric, approx };

struct SetFamily {
    int a = 0;
    int b = 0;
    double multiplicity = 0.0;
    MuSource mu_source = MuSource::approx;
    double mu_numeric = 0.0;  // consulted only when mu_source == numeric
};

struct FloorRefinements {
    bool check_gains = true;
    bool polarity_correction = false;
    bool paper_faithful_pp = false;   // polarity sum starts at three errors
    bool consistent_variance = false; // factor-2 reading of the extrinsic
                                      // variance term (2b -> 4b)
};

struct FloorConfig {
    std::vector<double> ebno_sweep;   // dB
    int iters = 12;
    double rate = 1723.0 / 2048.0;
    int n = 2048;
    int k_info = 1723;
    int d_v = 6;
    int d_c = 32;
    // Extrinsic means entering the decision statistic saturate here, mirroring
    // decoder LLR clipping; 0 disables. Gains always come from the raw
    // recursion.
    double llr_clip = 50.0;
    std::vector<SetFamily> set_families;
    FloorRefinements refinements;
};

// Mean/variance split of the Gaussian decision statistic.
struct GaussianStatistic {
    double mean = 0.0;
    double var = 0.0;
    double mean_channel = 0.0;
    double mean_extrinsic = 0.0;
    double var_channel = 0.0;
    double var_extrinsic = 0.0;
};

struct FamilyPoint {
    double ebno_db = 0.0;
    SetFamily family;
    double mu_max = 0.0;
    double p_as = 0.0;
    double log10_p_as = 0.0;
    double ber_contrib = 0.0;
    double fer_contrib = 0.0;
    GaussianStatistic stat;
};

struct FloorEstimate {
    FloorConfig config;
    std::vector<FamilyPoint> rows;  // sweep-major, families inner
    std::vector<double> ber;        // per sweep point
    std::vector<double> fer;
    // True when the DE means grew by 10x or more over the run; false flags an
    // operating point below threshold where the floor formulas are suspect.
    std::vector<bool> de_growth;
};

double resolve_mu(const SetFamily& f, int d_v);

// min(m, clip) per entry; clip <= 0 passes through.
std::vector<double> saturated_means(const std::vector<double>& m_ex,
                                    double clip);

// Decision statistic is beta = sum over members of the channel LLR plus the
// geometrically discounted extrinsic feed-through. With w_j = prod_{l<=j}
// 1/(g_l mu) the accumulated terms are
//   mean = a m_lambda (1 + sum w_j) + b sum m_ex(j) w_j
//   var  = 2a m_lambda (1 + sum w_j)^2 + 2b sum m_ex(j) w_j^2
// and P = Q(mean/sqrt(var)). consistent_variance doubles the extrinsic
// variance term. The basic form is the refined form with unit gains.
double p_as_basic(double m_lambda, const std::vector<double>& m_ex,
                  double mu_max, int a, int b,
                  bool consistent_variance = false);
double p_as_refined(double m_lambda, const std::vector<double>& m_ex,
                    const std::vector<double>& gains, double mu_max, int a,
                    int b, bool consistent_variance = false);

// Refined form with mu = (d_v - 1) - b/a. Throws when that gain is <= 1.
double p_as_general(int a, int b, int d_v, double m_lambda,
                    const std::vector<double>& m_ex,
                    const std::vector<double>& gains,
                    bool consistent_variance = false);

// Binomial mixture over k polarity-reversed extrinsic checks. Each reversal
// injects two corrections of mean -m_lambda/mu, shifting the mean by
// -2k m_lambda/mu. The variance add treats the 2k injected corrections as
// fully correlated (an upper bound): sd_extra = 2k w_1 sqrt(2 m_ex(1)).
// k_max < 0 means b. Reduces to p_as_refined at p_p = 0.
double polarity_corrected_pas(int a, int b, double m_lambda,
                              const std::vector<double>& m_ex,
                              const std::vector<double>& gains, double mu_max,
                              double p_p, int k_max = -1,
                              bool consistent_variance = false);

// Per-point DE, per-family P_AS, BER = sum mult P a / k_info and FER =
// min(1, sum mult P). de_provider(m_lambda) overrides the default
// evolve_means call (for testing).
FloorEstimate sweep(const FloorConfig& config,
                    const std::function<DEState(double)>& de_provider = {});

// Long-format rows: ebno_db, family_a, family_b, multiplicity, mu_max, p_as,
// ber_contrib, fer_contrib.
std::string floor_csv(const FloorEstimate& e);
// Aggregates: ebno_db, ber, fer, log10_ber, log10_fer.
std::string floor_summary_csv(const FloorEstimate& e);
std::string floor_json(const FloorEstimate& e);

std::vector<SetFamily> families_from_json(const std::string& text);
std::string families_to_json(const std::vector<SetFamily>& fams);

}  // namespace efloor
