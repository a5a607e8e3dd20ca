#include "efloor/floor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace efloor {

namespace {

struct Accum {
    double s = 0.0;    // sum of w_j
    double e1 = 0.0;   // sum of m_ex(j) w_j
    double e2 = 0.0;   // sum of m_ex(j) w_j^2
    double w1 = 0.0;   // first-iteration weight
};

Accum accumulate(const std::vector<double>& m_ex,
                 const std::vector<double>& gains, double mu) {
    if (!(mu > 1.0))
        throw std::invalid_argument("floor: gain mu_max must exceed 1");
    if (!gains.empty() && gains.size() != m_ex.size())
        throw std::invalid_argument("floor: gains/means length mismatch");
    Accum acc;
    double w = 1.0;
    for (std::size_t j = 0; j < m_ex.size(); ++j) {
        const double g = gains.empty() ? 1.0 : gains[j];
        if (!(g > 0.0) || g > 1.0)
            throw std::invalid_argument("floor: gains must lie in (0, 1]");
        w /= g * mu;
        if (j == 0) acc.w1 = w;
        acc.s += w;
        acc.e1 += m_ex[j] * w;
        acc.e2 += m_ex[j] * w * w;
    }
    return acc;
}

GaussianStatistic statistic(double m_lambda, int a, int b, const Accum& acc,
                            bool consistent_variance) {
    if (a < 1 || b < 0)
        throw std::invalid_argument("floor: need a >= 1, b >= 0");
    if (!(m_lambda > 0.0))
        throw std::invalid_argument("floor: intrinsic mean must be positive");
    GaussianStatistic st;
    st.mean_channel = a * m_lambda * (1.0 + acc.s);
    st.mean_extrinsic = b * acc.e1;
    st.var_channel = 2.0 * a * m_lambda * (1.0 + acc.s) * (1.0 + acc.s);
    st.var_extrinsic = (consistent_variance ? 4.0 : 2.0) * b * acc.e2;
    st.mean = st.mean_channel + st.mean_extrinsic;
    st.var = st.var_channel + st.var_extrinsic;
    return st;
}

double q_of(const GaussianStatistic& st) {
    return qfunc(st.mean / std::sqrt(st.var));
}

}  // namespace

double resolve_mu(const SetFamily& f, int d_v) {
    switch (f.mu_source) {
        case MuSource::lemma:
            if (f.a != f.b)
                throw std::invalid_argument(
                    "resolve_mu: lemma gain applies to symmetric sets (a == b)");
            return d_v - 2.0;
        case MuSource::numeric:
            if (!(f.mu_numeric > 1.0))
                throw std::invalid_argument(
                    "resolve_mu: numeric gain must exceed 1");
            return f.mu_numeric;
        case MuSource::approx: {
            const double mu = (d_v - 1.0) - static_cast<double>(f.b) / f.a;
            if (!(mu > 1.0))
                throw std::domain_error(
                    "resolve_mu: approximate gain (d_v-1)-b/a is <= 1");
            return mu;
        }
    }
    throw std::logic_error("resolve_mu: bad source");
}

std::vector<double> saturated_means(const std::vector<double>& m_ex,
                                    double clip) {
    if (clip <= 0.0) return m_ex;
    std::vector<double> out(m_ex);
    for (double& m : out) m = std::min(m, clip);
    return out;
}

double p_as_basic(double m_lambda, const std::vector<double>& m_ex,
                  double mu_max, int a, int b, bool consistent_variance) {
    const Accum acc = accumulate(m_ex, {}, mu_max);
    return q_of(statistic(m_lambda, a, b, acc, consistent_variance));
}

double p_as_refined(double m_lambda, const std::vector<double>& m_ex,
                    const std::vector<double>& gains, double mu_max, int a,
                    int b, bool consistent_variance) {
    const Accum acc = accumulate(m_ex, gains, mu_max);
    return q_of(statistic(m_lambda, a, b, acc, consistent_variance));
}

double p_as_general(int a, int b, int d_v, double m_lambda,
                    const std::vector<double>& m_ex,
                    const std::vector<double>& gains,
                    bool consistent_variance) {
    if (a < 1) throw std::invalid_argument("p_as_general: a must be positive");
    const double mu = (d_v - 1.0) - static_cast<double>(b) / a;
    if (!(mu > 1.0))
        throw std::domain_error("p_as_general: gain (d_v-1)-b/a is <= 1");
    return p_as_refined(m_lambda, m_ex, gains, mu, a, b, consistent_variance);
}

double polarity_corrected_pas(int a, int b, double m_lambda,
                              const std::vector<double>& m_ex,
                              const std::vector<double>& gains, double mu_max,
                              double p_p, int k_max, bool consistent_variance) {
    if (!(p_p >= 0.0) || p_p > 1.0)
        throw std::invalid_argument("polarity_corrected_pas: P_p outside [0,1]");
    const Accum acc = accumulate(m_ex, gains, mu_max);
    const GaussianStatistic st = statistic(m_lambda, a, b, acc,
                                           consistent_variance);
    if (p_p == 0.0) return q_of(st);
    if (k_max < 0 || k_max > b) k_max = b;
    const double mex1 = m_ex.empty() ? 0.0 : m_ex.front();
    double prob = 0.0;
    double weight = std::pow(1.0 - p_p, b);  // k = 0
    for (int k = 0; k <= k_max; ++k) {
        const double mean_k = st.mean - 2.0 * k * m_lambda / mu_max;
        const double sd_extra = 2.0 * k * acc.w1 * std::sqrt(2.0 * mex1);
        const double var_k = st.var + sd_extra * sd_extra;
        prob += weight * qfunc(mean_k / std::sqrt(var_k));
        weight *= static_cast<double>(b - k) / (k + 1) * p_p / (1.0 - p_p);
    }
    return prob;
}

FloorEstimate sweep(const FloorConfig& config,
                    const std::function<DEState(double)>& de_provider) {
    if (config.ebno_sweep.empty())
        throw std::invalid_argument("sweep: empty Eb/N0 grid");
    if (!(config.rate > 0.0) || config.rate >= 1.0)
        throw std::invalid_argument("sweep: rate outside (0, 1)");
    if (config.k_info < 1) throw std::invalid_argument("sweep: k_info < 1");
    for (const SetFamily& f : config.set_families)
        if (f.multiplicity < 0.0)
            throw std::invalid_argument("sweep: negative multiplicity");

    FloorEstimate est;
    est.config = config;
    const auto& refs = config.refinements;

    for (double ebno : config.ebno_sweep) {
        const double m_lambda = intrinsic_llr_mean(ebno, config.rate);
        const DEState de = de_provider
                               ? de_provider(m_lambda)
                               : evolve_means(config.d_v, config.d_c, m_lambda,
                                              config.iters);
        const std::vector<double> mex =
            saturated_means(de.m_ex, config.llr_clip);
        const std::vector<double> gains =
            refs.check_gains ? de.gains : std::vector<double>{};
        double p_p = 0.0;
        if (refs.polarity_correction) {
            const double es_n0 =
                config.rate * std::pow(10.0, ebno / 10.0);
            p_p = polarity_reversal_prob(raw_error_prob(es_n0), config.d_c,
                                         refs.paper_faithful_pp);
        }
        const bool growth = de.m_ex.size() >= 2 &&
                            de.m_ex.back() > 10.0 * de.m_ex.front();
        est.de_growth.push_back(growth);

        double ber = 0.0, fer = 0.0;
        for (const SetFamily& f : config.set_families) {
            FamilyPoint row;
            row.ebno_db = ebno;
            row.family = f;
            row.mu_max = resolve_mu(f, config.d_v);
            const Accum acc = accumulate(mex, gains, row.mu_max);
            row.stat = statistic(m_lambda, f.a, f.b, acc,
                                 refs.consistent_variance);
            const double qarg = row.stat.mean / std::sqrt(row.stat.var);
            if (refs.polarity_correction) {
                row.p_as = polarity_corrected_pas(f.a, f.b, m_lambda, mex,
                                                  gains, row.mu_max, p_p, -1,
                                                  refs.consistent_variance);
                row.log10_p_as = row.p_as > 0.0 ? std::log10(row.p_as)
                                                : qfunc_log10(qarg);
            } else {
                row.p_as = qfunc(qarg);
                row.log10_p_as = qfunc_log10(qarg);
            }
            row.ber_contrib = f.multiplicity * row.p_as * f.a / config.k_info;
            row.fer_contrib = f.multiplicity * row.p_as;
            ber += row.ber_contrib;
            fer += row.fer_contrib;
            est.rows.push_back(row);
        }
        est.ber.push_back(ber);
        est.fer.push_back(std::min(1.0, fer));
    }
    return est;
}

std::string floor_csv(const FloorEstimate& e) {
    std::ostringstream os;
    os.precision(12);
    os << "ebno_db,family_a,family_b,multiplicity,mu_max,p_as,ber_contrib,"
          "fer_contrib\n";
    for (const FamilyPoint& r : e.rows)
        os << r.ebno_db << ',' << r.family.a << ',' << r.family.b << ','
           << r.family.multiplicity << ',' << r.mu_max << ',' << r.p_as << ','
           << r.ber_contrib << ',' << r.fer_contrib << '\n';
    return os.str();
}

std::string floor_summary_csv(const FloorEstimate& e) {
    std::ostringstream os;
    os.precision(12);
    os << "ebno_db,ber,fer,log10_ber,log10_fer\n";
    for (std::size_t i = 0; i < e.config.ebno_sweep.size(); ++i) {
        const double ber = e.ber[i], fer = e.fer[i];
        os << e.config.ebno_sweep[i] << ',' << ber << ',' << fer << ','
           << (ber > 0.0 ? std::log10(ber) : -400.0) << ','
           << (fer > 0.0 ? std::log10(fer) : -400.0) << '\n';
    }
    return os.str();
}

namespace {

const char* mu_source_name(MuSource s) {
    switch (s) {
        case MuSource::lemma: return "lemma";
        case MuSource::numeric: return "numeric";
        case MuSource::approx: return "approx";
    }
    return "?";
}

}  // namespace

std::string floor_json(const FloorEstimate& e) {
    nlohmann::json j;
    j["config"] = {
        {"ebno_sweep", e.config.ebno_sweep},
        {"iters", e.config.iters},
        {"rate", e.config.rate},
        {"n", e.config.n},
        {"k_info", e.config.k_info},
        {"d_v", e.config.d_v},
        {"d_c", e.config.d_c},
        {"llr_clip", e.config.llr_clip},
        {"check_gains", e.config.refinements.check_gains},
        {"polarity_correction", e.config.refinements.polarity_correction},
        {"paper_faithful_pp", e.config.refinements.paper_faithful_pp},
        {"consistent_variance", e.config.refinements.consistent_variance},
    };
    j["families"] = nlohmann::json::array();
    for (const SetFamily& f : e.config.set_families)
        j["families"].push_back({{"a", f.a},
                                 {"b", f.b},
                                 {"multiplicity", f.multiplicity},
                                 {"mu", mu_source_name(f.mu_source)}});
    j["rows"] = nlohmann::json::array();
    for (const FamilyPoint& r : e.rows)
        j["rows"].push_back({{"ebno_db", r.ebno_db},
                             {"a", r.family.a},
                             {"b", r.family.b},
                             {"multiplicity", r.family.multiplicity},
                             {"mu_max", r.mu_max},
                             {"p_as", r.p_as},
                             {"log10_p_as", r.log10_p_as},
                             {"ber_contrib", r.ber_contrib},
                             {"fer_contrib", r.fer_contrib},
                             {"mean", r.stat.mean},
                             {"var", r.stat.var},
                             {"mean_channel", r.stat.mean_channel},
                             {"mean_extrinsic", r.stat.mean_extrinsic},
                             {"var_channel", r.stat.var_channel},
                             {"var_extrinsic", r.stat.var_extrinsic}});
    j["ber"] = e.ber;
    j["fer"] = e.fer;
    j["de_growth"] = e.de_growth;
    return j.dump(2);
}

std::vector<SetFamily> families_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_array())
        throw std::invalid_argument("families: top-level JSON array expected");
    std::vector<SetFamily> out;
    for (const auto& e : j) {
        SetFamily f;
        f.a = e.at("a").get<int>();
        f.b = e.at("b").get<int>();
        f.multiplicity = e.at("multiplicity").get<double>();
        if (f.a < 1 || f.b < 0 || f.multiplicity < 0.0)
            throw std::invalid_argument("families: bad a/b/multiplicity");
        if (e.contains("mu")) {
            const auto& mu = e.at("mu");
            if (mu.is_number()) {
                f.mu_source = MuSource::numeric;
                f.mu_numeric = mu.get<double>();
            } else {
                const std::string s = mu.get<std::string>();
                if (s == "lemma")
                    f.mu_source = MuSource::lemma;
                else if (s == "approx")
                    f.mu_source = MuSource::approx;
                else
                    throw std::invalid_argument("families: unknown mu source " +
                                                s);
            }
        }
        out.push_back(f);
    }
    return out;
}

std::string families_to_json(const std::vector<SetFamily>& fams) {
    nlohmann::json j = nlohmann::json::array();
    for (const SetFamily& f : fams) {
        nlohmann::json e = {{"a", f.a},
                            {"b", f.b},
                            {"multiplicity", f.multiplicity}};
        if (f.mu_source == MuSource::numeric)
            e["mu"] = f.mu_numeric;
        else
            e["mu"] = mu_source_name(f.mu_source);
        j.push_back(e);
    }
    return j.dump(2);
}

}  // namespace efloor
