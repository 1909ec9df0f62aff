#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "episample/designs.hpp"
#include "episample/frames.hpp"

namespace episample {

/// One tested contact: its infection mark and the link multiplicities the
/// tracing interview collects.
struct GwsmContact {
    std::int32_t person_id = -1;
    double y = 0.0;
    int links_verified = 0;             // L_vj
    int links_infected_complement = 0;  // L_Cj
    int links_total = 0;                // L_j
};

/// A first-stage unit with its traced contact subset.
struct GwsmAnchor {
    std::int32_t person_id = -1;
    double pi1 = 1.0;       // final first-stage inclusion probability
    double y_anchor = 0.0;  // y_k, used by the complement-frame estimator
    double pi2 = 1.0;       // within-anchor contact inclusion probability
    int contact_pool_size = 0;
    std::vector<GwsmContact> contacts;
};

struct GwsmInput {
    FrameOrigin side = FrameOrigin::Verified;
    long long frame_size = 0;
    std::vector<GwsmAnchor> anchors;

    int sample_size() const { return static_cast<int>(anchors.size()); }
};

/// Which per-contact value the weight share runs over.
enum class GwsmKind {
    GroupTotal,     // y_j / L
    Overlap,        // y_j 1(other-frame multiplicity >= 1) / L
    AltCorrection,  // y_j 1((L_j - L_Cj) >= 1) / L_vj, verified side only
};

struct GwsmEstimate {
    double total = 0.0;
    std::vector<double> anchor_estimates;             // Zhat_k
    std::vector<std::vector<double>> contact_terms;   // per anchor, before 1/pi2
};

/// Weight-share evaluation: total = sum_k (1/pi1_k) Zhat_k with
/// Zhat_k = [y_k] sum_j (1/pi2_k) (1/L_j) y_j [indicator]. The multiplicity
/// divisor is L_vj on the verified side and L_Cj on the complement side.
GwsmEstimate evaluate_gwsm(const GwsmInput& input, GwsmKind kind);

GwsmEstimate estimate_group_a(const GwsmInput& input);
GwsmEstimate estimate_group_b(const GwsmInput& input);
GwsmEstimate estimate_overlap(const GwsmInput& input);

/// Plain weighted total of the anchors' own marks (no tracing).
double estimate_complement_ht(const GwsmInput& panel);

struct AltEstimate {
    double total = 0.0;          // Y_alt
    double group_a = 0.0;        // first component
    double complement_ht = 0.0;  // second component
    double correction = 0.0;     // weight-share correction term
};

/// Alternative strategy that avoids back-tracing: group-A estimate plus the
/// plain panel total, minus a correction traced from the verified side.
AltEstimate estimate_alt(const GwsmInput& input_a, const GwsmInput& panel);

/// Convex composite of the two overlap estimates, Y_A + Y_B - Y_AB(alpha).
double composite(double y_a, double y_b, double y_ab_a, double y_ab_b,
                 double alpha);

struct TwoStageVariance {
    double first_stage = 0.0;
    double second_stage = 0.0;
    double total = 0.0;
};

/// SRSWOR-at-both-stages variance estimate:
/// N^2 (1-f) s^2_Zhat / n plus the weighted within-anchor terms.
TwoStageVariance variance_two_stage(const GwsmInput& input,
                                    const GwsmEstimate& est);

/// Covariance analog, used for the composite variance and alpha selection.
double covariance_two_stage(const GwsmInput& input, const GwsmEstimate& est_x,
                            const GwsmEstimate& est_y);

struct CompositeVariance {
    double value = 0.0;
    bool floored = false;  // raw result was negative and clamped to zero
};

CompositeVariance variance_composite(double v_a, double v_b, double v_ab_a,
                                     double v_ab_b, double cov_a, double cov_b,
                                     double alpha);

struct AlphaChoice {
    double value = 0.5;
    bool clamped = false;
};

/// Hartley's simplified weight V_B / (V_A + V_B); 0.5 when degenerate.
double alpha_star(double v_a, double v_b);

/// Variance-minimizing weight as printed, clamped to [0,1] with the
/// clamping reported.
AlphaChoice alpha_opt(double v_a, double v_b, double cov_ab_a_with_a,
                      double cov_ab_b_with_b);

/// Exact quadratic-vertex minimizer of the composite variance in alpha,
/// (V_AB_B + Cov_A - Cov_B) / (V_AB_A + V_AB_B), clamped to [0,1].
AlphaChoice alpha_min_variance(double v_ab_a, double v_ab_b, double cov_a,
                               double cov_b);

enum class AlphaPolicy { Fixed, Star, Opt, MinVariance };

std::string alpha_policy_name(AlphaPolicy p);
AlphaPolicy alpha_policy_from_name(const std::string& name);

/// Generalized capture-recapture estimate Y_A * Y_B / Y_AB(overlap).
/// Throws std::domain_error when the overlap estimate is not positive.
double gcre(double y_a, double y_b, double y_ab_overlap);

/// Point estimates, variance components and the composite for one
/// replication. Serializes to JSON with stable field names.
struct EstimateReport {
    int day = 0;
    std::string scheme;
    double y_a = 0.0;
    double y_b = 0.0;
    double y_ab_a = 0.0;
    double y_ab_b = 0.0;
    double alpha = 0.5;
    bool alpha_clamped = false;
    std::string alpha_policy;
    double y_hat = 0.0;
    TwoStageVariance var_a;
    TwoStageVariance var_b;
    double var_ab_a = 0.0;
    double var_ab_b = 0.0;
    double cov_a = 0.0;
    double cov_b = 0.0;
    CompositeVariance var_composite;
    std::vector<double> anchor_estimates_a;
    std::vector<double> anchor_estimates_b;
    std::optional<double> y_alt;
    std::optional<double> y_gcre;

    std::string to_json() const;
};

/// Assembled survey data: the estimator input plus the exportable sample
/// (first-stage units and traced contact units).
struct BuiltSample {
    GwsmInput input;
    Sample full_sample;
};

/// Traces contacts for every verified-frame unit and collects test results
/// and multiplicities from the world.
BuiltSample build_group_a_input(const DayWorld& world, const Sample& first_stage,
                                const ContactScheme& scheme, RngStream& rng);

/// Traces contacts only for panel members that test positive.
BuiltSample build_group_b_input(const DayWorld& world, const Sample& panel,
                                const ContactScheme& scheme, RngStream& rng);

}  // namespace episample
