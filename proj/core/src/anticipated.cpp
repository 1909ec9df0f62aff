#include "episample/anticipated.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "episample/rng.hpp"

namespace episample {

void AvParams::validate() const {
    if (population <= 0.0) throw std::invalid_argument("population must be positive");
    if (sampling_fraction <= 0.0 || sampling_fraction >= 1.0)
        throw std::invalid_argument("sampling fraction must be in (0,1)");
    if (mu < 0.0 || mu > 1.0 || theta < 0.0 || theta > 1.0)
        throw std::invalid_argument("proportions must be in [0,1]");
    if (mu > theta)
        throw std::invalid_argument("mu must not exceed theta");
    if (mean_contacts < 1.0)
        throw std::invalid_argument("mean contact count must be >= 1");
    if (verified_share < 0.0 || verified_share > 1.0)
        throw std::invalid_argument("verified share must be in [0,1]");
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("alpha must be in [0,1]");
    if (gamma_a < 0.0 || gamma_a > 1.0 || gamma_b < 0.0 || gamma_b > 1.0)
        throw std::invalid_argument("overlap proportions must be in [0,1]");
}

double av_srs_ht(double population, double sampling_fraction, double mu) {
    if (sampling_fraction <= 0.0)
        throw std::invalid_argument("sampling fraction must be positive");
    return population / sampling_fraction * mu * (1.0 - mu);
}

double av_group_a(const AvParams& p) {
    p.validate();
    const double a = p.alpha, ga = p.gamma_a, th = p.theta;
    const double bracket =
        (1.0 - th) * (1.0 - 2.0 * a * ga) + a * a * ga * (1.0 - ga * th);
    return p.verified_share * p.population / p.sampling_fraction *
           (1.0 / p.mean_contacts) * th * bracket;
}

double av_group_b(const AvParams& p) {
    p.validate();
    if (p.verified_share >= 1.0) return 0.0;  // no complement-frame sample
    if (p.mu <= 0.0)
        throw std::domain_error("complement-frame AV needs mu > 0");
    const double a = p.alpha, gb = p.gamma_b, th = p.theta, mu = p.mu;
    const double one_m_a = 1.0 - a;
    const double bracket = (1.0 - mu * th) +
                           one_m_a * one_m_a * gb * (1.0 - gb * mu * th) -
                           2.0 * one_m_a * gb * (1.0 - mu * th);
    return (1.0 - p.verified_share) * p.population /
           (p.sampling_fraction * p.mean_contacts * mu) * th * bracket;
}

double av_strategy(const AvParams& p) { return av_group_a(p) + av_group_b(p); }

double efficiency_ratio(const AvParams& p) {
    const double denom = av_srs_ht(p.population, p.sampling_fraction, p.mu);
    if (denom <= 0.0)
        throw std::domain_error("SRS-HT anticipated variance is degenerate");
    return av_strategy(p) / denom;
}

namespace {

double variance(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double s2 = 0.0;
    for (double x : xs) s2 += (x - mean) * (x - mean);
    return s2 / static_cast<double>(n - 1);
}

}  // namespace

ModelAvEstimates simulate_model_av(const AvParams& p, int sample_size,
                                   int replications, std::uint64_t seed) {
    p.validate();
    if (sample_size < 2 || replications < 2)
        throw std::invalid_argument("need sample_size >= 2 and replications >= 2");
    const int L = static_cast<int>(std::llround(p.mean_contacts));
    if (L < 1) throw std::invalid_argument("mean contact count must round to >= 1");
    const double f = p.sampling_fraction;
    const int n_a = static_cast<int>(std::llround(p.verified_share * sample_size));
    const int n_b = sample_size - n_a;

    // finite world for the plain SRS-HT baseline
    const int n_pop = static_cast<int>(std::llround(p.population));
    const int n_srs = std::max(1, static_cast<int>(std::llround(f * n_pop)));

    RngStream rng(derive_seed(seed, 0xAV01));
    std::vector<double> srs_hat, da, db, strat;
    srs_hat.reserve(replications);
    da.reserve(replications);
    db.reserve(replications);
    strat.reserve(replications);

    std::vector<char> marks(n_pop);
    for (int r = 0; r < replications; ++r) {
        // (a) iid Bernoulli(mu) marks over a finite population, SRSWOR, HT
        for (int i = 0; i < n_pop; ++i) marks[i] = rng.bernoulli(p.mu) ? 1 : 0;
        int hits = 0;
        int taken = 0;
        for (int i = 0; i < n_pop && taken < n_srs; ++i) {
            const double keep = static_cast<double>(n_srs - taken) / (n_pop - i);
            if (rng.uniform() < keep) {
                hits += marks[i];
                ++taken;
            }
        }
        srs_hat.push_back(static_cast<double>(hits) * n_pop / n_srs);

        // (b) verified-frame slots: y ~ Bern(theta), thinning ~ Bern(gamma_a)
        double ya = 0.0, yab_a = 0.0;
        for (int k = 0; k < n_a; ++k) {
            for (int j = 0; j < L; ++j) {
                if (!rng.bernoulli(p.theta)) continue;
                ya += 1.0;
                if (rng.bernoulli(p.gamma_a)) yab_a += 1.0;
            }
        }
        ya /= f * L;
        yab_a /= f * L;
        da.push_back(ya - p.alpha * yab_a);

        // (c) complement-frame slots: anchor mark ~ Bern(mu), then contacts
        double yb = 0.0, yab_b = 0.0;
        for (int k = 0; k < n_b; ++k) {
            if (!rng.bernoulli(p.mu)) continue;
            for (int j = 0; j < L; ++j) {
                if (!rng.bernoulli(p.theta)) continue;
                yb += 1.0;
                if (rng.bernoulli(p.gamma_b)) yab_b += 1.0;
            }
        }
        yb /= f * L * p.mu;
        yab_b /= f * L * p.mu;
        db.push_back(yb - (1.0 - p.alpha) * yab_b);

        strat.push_back(da.back() + db.back());
    }

    ModelAvEstimates out;
    out.var_srs_ht = variance(srs_hat);
    out.var_group_a = variance(da);
    out.var_group_b = variance(db);
    out.var_strategy = variance(strat);
    double mean = 0.0;
    for (double x : strat) mean += x;
    out.mean_strategy = mean / strat.size();
    return out;
}

std::string av_table(const AvParams& p) {
    char buf[128];
    std::string out;
    const double srs = av_srs_ht(p.population, p.sampling_fraction, p.mu);
    const double a = av_group_a(p);
    const double b = av_group_b(p);
    std::snprintf(buf, sizeof(buf), "%-22s %18.6f\n", "AV(SRS-HT)", srs);
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-22s %18.6f\n", "AV(group A part)", a);
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-22s %18.6f\n", "AV(group B part)", b);
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-22s %18.6f\n", "AV(strategy)", a + b);
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-22s %18.6f\n", "efficiency ratio",
                  (a + b) / srs);
    out += buf;
    return out;
}

}  // namespace episample
