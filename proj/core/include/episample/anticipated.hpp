#pragma once

#include <cstdint>
#include <string>

namespace episample {

/// Superpopulation parameters for the closed-form anticipated variances.
struct AvParams {
    double population = 0.0;        // N
    double sampling_fraction = 0.0; // f = n/N
    double mu = 0.0;                // overall infection proportion Y/N
    double theta = 0.0;             // infection proportion within the linked set
    double mean_contacts = 1.0;     // L
    double verified_share = 0.5;    // P_v: share of the sample allocated to U_v
    double alpha = 0.5;
    double gamma_a = 1.0;           // Y_AB / Y_A
    double gamma_b = 1.0;           // Y_AB / Y_B

    void validate() const;
};

/// Anticipated variance of the plain SRSWOR HT total under iid
/// Bernoulli(mu) marks: (N/f) mu (1-mu).
double av_srs_ht(double population, double sampling_fraction, double mu);

/// Anticipated variance of the verified-frame part of the strategy.
double av_group_a(const AvParams& p);

/// Anticipated variance of the complement-frame part. Requires mu > 0
/// unless the complement share is zero.
double av_group_b(const AvParams& p);

/// Sum of the two parts.
double av_strategy(const AvParams& p);

/// AV(strategy) / AV(SRS-HT). Linear in verified_share.
double efficiency_ratio(const AvParams& p);

/// Empirical counterparts from a direct simulation of the superpopulation
/// model: per-anchor contact slots with iid Bernoulli marks and iid
/// indicator thinning, constant contact count L.
struct ModelAvEstimates {
    double var_srs_ht = 0.0;
    double var_group_a = 0.0;   // var of (Ya_hat - alpha Yab_a_hat)
    double var_group_b = 0.0;   // var of (Yb_hat - (1-alpha) Yab_b_hat)
    double var_strategy = 0.0;
    double mean_strategy = 0.0;
};

ModelAvEstimates simulate_model_av(const AvParams& p, int sample_size,
                                   int replications, std::uint64_t seed);

/// Labeled text table of all four AVs and the efficiency ratio.
std::string av_table(const AvParams& p);

}  // namespace episample
