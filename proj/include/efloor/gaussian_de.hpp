#pragma once

#include <vector>

namespace efloor {

// Mean evolution state for a regular (d_v, d_c) ensemble under the
// consistent-Gaussian approximation (variance = 2 * mean throughout).
struct DEState {
    int d_v = 0;
    int d_c = 0;
    double m_lambda = 0.0;   // intrinsic LLR mean
    double sigma2 = 0.0;     // channel noise variance, when known
    double ebno_db = 0.0;    // operating point, when known
    std::vector<double> m_v2c;   // variable-to-check mean, iterations 1..I
    std::vector<double> m_ex;    // check-to-variable extrinsic mean, 1..I
    std::vector<double> gains;   // g_i = (1 - phi(m_v2c_i))^(d_c-2), 1..I
};

// Check-node mean transfer phi(m) = 1 - E[tanh(u/2)], u ~ N(m, 2m).
// Composite Gauss-Legendre quadrature below m = 250 (about 1e-13 relative),
// Euler-number asymptotic series above; the branches agree to ~1e-12 at the
// crossover. Throws on negative m.
double phi(double m);

// ln phi(m), finite for every m a double can hold; the linear value
// underflows past m ~ 2840.
double phi_ln(double m);

// Inverse of phi on (0,1] by bracketed bisection; phi(phi_inv(y)) matches y
// to 1e-10 relative. Throws outside (0,1].
double phi_inv(double y);
double phi_inv_ln(double ln_y);  // inverse from ln y, for underflowing y

// m_v2c(i) = m_lambda + (d_v-1) m_ex(i-1), m_ex(0) = 0,
// m_ex(i) = phi_inv(1 - [1 - phi(m_v2c(i))]^(d_c-1)), switching to the log
// domain once phi underflows. Gains recorded per iteration.
DEState evolve_means(int d_v, int d_c, double m_lambda, int iters);

// 1-based accessor with range checking.
double check_gain(const DEState& s, int i);

// Q(sqrt(2 Es/N0)).
double raw_error_prob(double es_n0);

// Odd-error-count probability over d_c - 2 inputs. The default sums from a
// single error; paper_faithful starts at three errors instead. The closed
// form (1 - (1-2p)^(d_c-2))/2 equals the full sum and is used in tests.
double polarity_reversal_prob(double p_e, int d_c, bool paper_faithful = false);

// BPSK, unit symbol energy, Es = R Eb: m_lambda = 2/sigma^2 = 4 R Eb/N0.
double intrinsic_llr_mean(double ebno_db, double rate);
double channel_sigma2(double ebno_db, double rate);

// Log-stable Gaussian tail: erfc form up to x = 35, asymptotic expansion
// beyond, so arguments far past the underflow point stay meaningful.
double qfunc(double x);
double qfunc_log10(double x);

}  // namespace efloor
