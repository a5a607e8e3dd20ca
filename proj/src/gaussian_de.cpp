#include "efloor/gaussian_de.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace efloor {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kAsymptoticSwitch = 250.0;

// 32-point Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on the
// Legendre recurrence. Computed once; accurate to machine precision.
struct GaussRule {
    std::array<double, 32> x{};
    std::array<double, 32> w{};
    GaussRule() {
        const int n = 32;
        for (int i = 0; i < n / 2; ++i) {
            double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
                }
                pp = n * (z * p0 - p1) / (z * z - 1.0);
                double dz = p0 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-15) break;
            }
            x[i] = -z;
            x[n - 1 - i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
            w[n - 1 - i] = w[i];
        }
    }
};

const GaussRule& rule() {
    static const GaussRule r;
    return r;
}

// Integral representation: phi(m) = e^{-m/4}/sqrt(4 pi m) *
// Int_{-inf}^{inf} sech(u/2) e^{-u^2/(4m)} du. The integrand is even and
// both factors decay, so [0, T] with T = min(90, 35 sqrt(m) + 1) truncates
// below 1e-20 of the total. 24 panels track the narrower of the two scales.
double phi_integral(double m) {
    const auto& r = rule();
    const double T = std::min(90.0, 35.0 * std::sqrt(m) + 1.0);
    const int panels = 24;
    const double h = T / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = p * h;
        double acc = 0.0;
        for (int k = 0; k < 32; ++k) {
            const double u = a + 0.5 * h * (r.x[k] + 1.0);
            acc += r.w[k] / std::cosh(0.5 * u) * std::exp(-u * u / (4.0 * m));
        }
        total += acc * 0.5 * h;
    }
    // even integrand: full-line integral is twice the half-line one
    return std::exp(-0.25 * m) / std::sqrt(4.0 * kPi * m) * 2.0 * total;
}

// Signed Euler numbers E_0, E_2, ..., E_18.
constexpr std::array<double, 10> kEuler = {
    1.0, -1.0, 5.0, -61.0, 1385.0, -50521.0, 2702765.0,
    -199360981.0, 19391512145.0, -2404879675441.0};

// phi(m) ~ sqrt(pi/m) e^{-m/4} sum_k E_2k (pi^2/(4m))^k / k!, m large.
double phi_series(double m) {
    double sum = 0.0;
    double term = 1.0;
    const double q = kPi * kPi / (4.0 * m);
    for (int k = 0; k < static_cast<int>(kEuler.size()); ++k) {
        sum += kEuler[k] * term;
        term *= q / (k + 1);
    }
    return sum;
}

double phi_ln_series(double m) {
    return -0.25 * m + 0.5 * std::log(kPi / m) + std::log(phi_series(m));
}

void check_mean(double m) {
    if (!(m >= 0.0))
        throw std::invalid_argument("phi: mean must be nonnegative, got " +
                                    std::to_string(m));
}

// Generic decreasing-function bisection for the phi inverses. f(0) = top;
// grows hi geometrically until f(hi) < target, then halves.
template <typename F>
double invert_decreasing(F f, double target, const char* what) {
    double lo = 0.0, hi = 1.0;
    while (f(hi) > target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e306) throw std::runtime_error(std::string(what) + ": no bracket");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-14 * hi) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double phi(double m) {
    check_mean(m);
    if (m == 0.0) return 1.0;
    if (m < kAsymptoticSwitch) return std::min(1.0, phi_integral(m));
    return std::exp(phi_ln_series(m));
}

double phi_ln(double m) {
    check_mean(m);
    if (m == 0.0) return 0.0;
    if (m < kAsymptoticSwitch) return std::log(std::min(1.0, phi_integral(m)));
    return phi_ln_series(m);
}

double phi_inv(double y) {
    if (!(y > 0.0) || y > 1.0)
        throw std::invalid_argument("phi_inv: argument outside (0, 1]");
    if (y == 1.0) return 0.0;
    return invert_decreasing([](double m) { return phi(m); }, y, "phi_inv");
}

double phi_inv_ln(double ln_y) {
    if (!(ln_y <= 0.0))
        throw std::invalid_argument("phi_inv_ln: ln y must be <= 0");
    if (ln_y == 0.0) return 0.0;
    return invert_decreasing([](double m) { return phi_ln(m); }, ln_y,
                             "phi_inv_ln");
}

DEState evolve_means(int d_v, int d_c, double m_lambda, int iters) {
    if (d_v < 2 || d_c < 3)
        throw std::invalid_argument("evolve_means: need d_v >= 2, d_c >= 3");
    if (!(m_lambda > 0.0))
        throw std::invalid_argument("evolve_means: intrinsic mean must be positive");
    if (iters < 1 || iters > 400)
        throw std::invalid_argument("evolve_means: iteration count out of range");

    DEState s;
    s.d_v = d_v;
    s.d_c = d_c;
    s.m_lambda = m_lambda;
    s.m_v2c.reserve(iters);
    s.m_ex.reserve(iters);
    s.gains.reserve(iters);

    double prev_ex = 0.0;
    for (int i = 1; i <= iters; ++i) {
        const double mv = m_lambda + (d_v - 1) * prev_ex;
        double mex;
        double z = (mv < 2500.0) ? phi(mv) : 0.0;
        if (z > 1e-280) {
            // 1 - (1-z)^(d_c-1) without cancellation.
            const double w = -std::expm1((d_c - 1) * std::log1p(-z));
            mex = phi_inv(w);
        } else {
            // Underflow region: 1 - (1-z)^(d_c-1) = (d_c-1) z to 1e-280.
            const double ln_w = std::log(static_cast<double>(d_c - 1)) + phi_ln(mv);
            mex = phi_inv_ln(ln_w);
        }
        const double g = (z > 0.0) ? std::pow(1.0 - z, d_c - 2) : 1.0;
        s.m_v2c.push_back(mv);
        s.m_ex.push_back(mex);
        s.gains.push_back(g);
        prev_ex = mex;
    }
    return s;
}

double check_gain(const DEState& s, int i) {
    if (i < 1 || i > static_cast<int>(s.gains.size()))
        throw std::out_of_range("check_gain: iteration index out of range");
    return s.gains[i - 1];
}

double raw_error_prob(double es_n0) {
    if (!(es_n0 >= 0.0))
        throw std::invalid_argument("raw_error_prob: Es/N0 must be nonnegative");
    return 0.5 * std::erfc(std::sqrt(es_n0));
}

double polarity_reversal_prob(double p_e, int d_c, bool paper_faithful) {
    if (!(p_e >= 0.0) || p_e > 1.0)
        throw std::invalid_argument("polarity_reversal_prob: p outside [0, 1]");
    if (d_c < 3) throw std::invalid_argument("polarity_reversal_prob: d_c < 3");
    const int n = d_c - 2;
    const int j0 = paper_faithful ? 3 : 1;
    if (p_e == 0.0) return 0.0;
    if (p_e == 1.0) return ((n & 1) && n >= j0) ? 1.0 : 0.0;
    double sum = 0.0;
    // C(n, j) p^j (1-p)^(n-j), odd j only, built incrementally.
    double term = n * p_e * std::pow(1.0 - p_e, n - 1);  // j = 1
    for (int j = 1; j <= n; ++j) {
        if (j >= j0 && (j & 1)) sum += term;
        term *= static_cast<double>(n - j) / (j + 1) * p_e / (1.0 - p_e);
    }
    return sum;
}

double intrinsic_llr_mean(double ebno_db, double rate) {
    return 4.0 * rate * std::pow(10.0, ebno_db / 10.0);
}

double channel_sigma2(double ebno_db, double rate) {
    return 1.0 / (2.0 * rate * std::pow(10.0, ebno_db / 10.0));
}

double qfunc_log10(double x) {
    if (x <= 35.0)
        return std::log10(0.5 * std::erfc(x / std::sqrt(2.0)));
    // Q(x) = e^{-x^2/2} / (x sqrt(2 pi)) (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...)
    const double x2 = x * x;
    const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return (-0.5 * x2) / std::log(10.0) -
           std::log10(x * std::sqrt(2.0 * kPi)) + std::log10(series);
}

double qfunc(double x) {
    if (x <= 35.0) return 0.5 * std::erfc(x / std::sqrt(2.0));
    const double l10 = qfunc_log10(x);
    return (l10 < -307.0) ? 0.0 : std::pow(10.0, l10);
}

}  // namespace efloor
