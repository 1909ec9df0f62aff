#include "episample/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace episample {

namespace {

void check_pi(double pi, const char* what) {
    if (!(pi > 0.0) || pi > 1.0)
        throw std::domain_error(std::string(what) + " outside (0,1]");
}

double contact_term(const GwsmContact& c, FrameOrigin side, GwsmKind kind) {
    const int mult = side == FrameOrigin::Verified ? c.links_verified
                                                   : c.links_infected_complement;
    if (mult < 1)
        throw std::logic_error(
            "traced contact with zero multiplicity in its own frame");
    switch (kind) {
        case GwsmKind::GroupTotal:
            return c.y / mult;
        case GwsmKind::Overlap: {
            const int other = side == FrameOrigin::Verified
                                  ? c.links_infected_complement
                                  : c.links_verified;
            return other >= 1 ? c.y / mult : 0.0;
        }
        case GwsmKind::AltCorrection: {
            if (side != FrameOrigin::Verified)
                throw std::logic_error(
                    "alt correction is traced from the verified frame");
            return (c.links_total - c.links_infected_complement) >= 1
                       ? c.y / mult
                       : 0.0;
        }
    }
    throw std::logic_error("unreachable GWSM kind");
}

}  // namespace

GwsmEstimate evaluate_gwsm(const GwsmInput& input, GwsmKind kind) {
    GwsmEstimate est;
    est.anchor_estimates.reserve(input.anchors.size());
    est.contact_terms.reserve(input.anchors.size());
    for (const GwsmAnchor& a : input.anchors) {
        check_pi(a.pi1, "first-stage pi");
        std::vector<double> terms;
        double zhat = 0.0;
        if (input.side == FrameOrigin::Complement && a.y_anchor == 0.0) {
            if (!a.contacts.empty())
                throw std::logic_error(
                    "contacts traced for a panel member that tested negative");
        }
        if (!a.contacts.empty()) {
            check_pi(a.pi2, "second-stage pi");
            terms.reserve(a.contacts.size());
            for (const GwsmContact& c : a.contacts) {
                const double t = contact_term(c, input.side, kind);
                terms.push_back(t);
                zhat += t;
            }
            zhat /= a.pi2;
        }
        if (input.side == FrameOrigin::Complement) zhat *= a.y_anchor;
        est.total += zhat / a.pi1;
        est.anchor_estimates.push_back(zhat);
        est.contact_terms.push_back(std::move(terms));
    }
    return est;
}

GwsmEstimate estimate_group_a(const GwsmInput& input) {
    if (input.side != FrameOrigin::Verified)
        throw std::logic_error("group A estimator expects verified-frame input");
    return evaluate_gwsm(input, GwsmKind::GroupTotal);
}

GwsmEstimate estimate_group_b(const GwsmInput& input) {
    if (input.side != FrameOrigin::Complement)
        throw std::logic_error("group B estimator expects complement-frame input");
    return evaluate_gwsm(input, GwsmKind::GroupTotal);
}

GwsmEstimate estimate_overlap(const GwsmInput& input) {
    return evaluate_gwsm(input, GwsmKind::Overlap);
}

double estimate_complement_ht(const GwsmInput& panel) {
    double total = 0.0;
    for (const GwsmAnchor& a : panel.anchors) {
        check_pi(a.pi1, "first-stage pi");
        total += a.y_anchor / a.pi1;
    }
    return total;
}

AltEstimate estimate_alt(const GwsmInput& input_a, const GwsmInput& panel) {
    AltEstimate alt;
    alt.group_a = estimate_group_a(input_a).total;
    alt.complement_ht = estimate_complement_ht(panel);
    alt.correction = evaluate_gwsm(input_a, GwsmKind::AltCorrection).total;
    alt.total = alt.group_a + alt.complement_ht - alt.correction;
    return alt;
}

double composite(double y_a, double y_b, double y_ab_a, double y_ab_b,
                 double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("alpha outside [0,1]");
    return y_a + y_b - (alpha * y_ab_a + (1.0 - alpha) * y_ab_b);
}

TwoStageVariance variance_two_stage(const GwsmInput& input,
                                    const GwsmEstimate& est) {
    const int n = input.sample_size();
    const long long N = input.frame_size;
    TwoStageVariance v;
    if (n < static_cast<long long>(N) && n < 2)
        throw std::invalid_argument("variance undefined for n < 2");

    if (n < N) {
        double mean = 0.0;
        for (double z : est.anchor_estimates) mean += z;
        mean /= n;
        double s2 = 0.0;
        for (double z : est.anchor_estimates) s2 += (z - mean) * (z - mean);
        s2 /= (n - 1);
        const double f = static_cast<double>(n) / N;
        v.first_stage = static_cast<double>(N) * N * (1.0 - f) * s2 / n;
    }

    for (std::size_t k = 0; k < input.anchors.size(); ++k) {
        const GwsmAnchor& a = input.anchors[k];
        const auto& terms = est.contact_terms[k];
        const int m = static_cast<int>(terms.size());
        const int M = a.contact_pool_size;
        if (m == 0 || m >= M || m < 2) continue;  // census or inestimable
        double mean = 0.0;
        for (double t : terms) mean += t;
        mean /= m;
        double s2 = 0.0;
        for (double t : terms) s2 += (t - mean) * (t - mean);
        s2 /= (m - 1);
        double v2k = static_cast<double>(M) * M *
                     (1.0 - static_cast<double>(m) / M) * s2 / m;
        if (input.side == FrameOrigin::Complement) v2k *= a.y_anchor * a.y_anchor;
        v.second_stage += v2k / a.pi1;
    }
    v.total = v.first_stage + v.second_stage;
    return v;
}

double covariance_two_stage(const GwsmInput& input, const GwsmEstimate& est_x,
                            const GwsmEstimate& est_y) {
    const int n = input.sample_size();
    const long long N = input.frame_size;
    double cov = 0.0;

    if (n < N && n >= 2) {
        double mx = 0.0, my = 0.0;
        for (int k = 0; k < n; ++k) {
            mx += est_x.anchor_estimates[k];
            my += est_y.anchor_estimates[k];
        }
        mx /= n;
        my /= n;
        double sxy = 0.0;
        for (int k = 0; k < n; ++k)
            sxy += (est_x.anchor_estimates[k] - mx) *
                   (est_y.anchor_estimates[k] - my);
        sxy /= (n - 1);
        const double f = static_cast<double>(n) / N;
        cov += static_cast<double>(N) * N * (1.0 - f) * sxy / n;
    }

    for (std::size_t k = 0; k < input.anchors.size(); ++k) {
        const GwsmAnchor& a = input.anchors[k];
        const auto& tx = est_x.contact_terms[k];
        const auto& ty = est_y.contact_terms[k];
        const int m = static_cast<int>(tx.size());
        const int M = a.contact_pool_size;
        if (m == 0 || m >= M || m < 2) continue;
        double mx = 0.0, my = 0.0;
        for (int j = 0; j < m; ++j) {
            mx += tx[j];
            my += ty[j];
        }
        mx /= m;
        my /= m;
        double sxy = 0.0;
        for (int j = 0; j < m; ++j) sxy += (tx[j] - mx) * (ty[j] - my);
        sxy /= (m - 1);
        double c2k = static_cast<double>(M) * M *
                     (1.0 - static_cast<double>(m) / M) * sxy / m;
        if (input.side == FrameOrigin::Complement) c2k *= a.y_anchor * a.y_anchor;
        cov += c2k / a.pi1;
    }
    return cov;
}

CompositeVariance variance_composite(double v_a, double v_b, double v_ab_a,
                                     double v_ab_b, double cov_a, double cov_b,
                                     double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("alpha outside [0,1]");
    CompositeVariance out;
    out.value = v_a + v_b + alpha * alpha * v_ab_a +
                (1.0 - alpha) * (1.0 - alpha) * v_ab_b - 2.0 * alpha * cov_a -
                2.0 * (1.0 - alpha) * cov_b;
    if (out.value < 0.0) {
        out.value = 0.0;
        out.floored = true;
    }
    return out;
}

double alpha_star(double v_a, double v_b) {
    if (v_a < 0.0 || v_b < 0.0)
        throw std::invalid_argument("variances must be nonnegative");
    const double denom = v_a + v_b;
    if (denom <= 0.0) return 0.5;  // degenerate: both exact
    return v_b / denom;
}

namespace {

AlphaChoice clamp_alpha(double raw) {
    AlphaChoice c;
    if (raw < 0.0) {
        c.value = 0.0;
        c.clamped = true;
    } else if (raw > 1.0) {
        c.value = 1.0;
        c.clamped = true;
    } else {
        c.value = raw;
    }
    return c;
}

}  // namespace

AlphaChoice alpha_opt(double v_a, double v_b, double cov_ab_a_with_a,
                      double cov_ab_b_with_b) {
    const double denom = v_a + v_b;
    if (denom <= 0.0) return AlphaChoice{0.5, false};
    return clamp_alpha((v_b + cov_ab_b_with_b - cov_ab_a_with_a) / denom);
}

AlphaChoice alpha_min_variance(double v_ab_a, double v_ab_b, double cov_a,
                               double cov_b) {
    const double denom = v_ab_a + v_ab_b;
    if (denom <= 0.0) return AlphaChoice{0.5, false};
    return clamp_alpha((v_ab_b + cov_a - cov_b) / denom);
}

std::string alpha_policy_name(AlphaPolicy p) {
    switch (p) {
        case AlphaPolicy::Fixed: return "fixed";
        case AlphaPolicy::Star: return "star";
        case AlphaPolicy::Opt: return "opt";
        case AlphaPolicy::MinVariance: return "minvar";
    }
    throw std::logic_error("unreachable alpha policy");
}

AlphaPolicy alpha_policy_from_name(const std::string& name) {
    if (name == "fixed") return AlphaPolicy::Fixed;
    if (name == "star") return AlphaPolicy::Star;
    if (name == "opt") return AlphaPolicy::Opt;
    if (name == "minvar") return AlphaPolicy::MinVariance;
    throw std::invalid_argument("unknown alpha policy: " + name);
}

double gcre(double y_a, double y_b, double y_ab_overlap) {
    if (!(y_ab_overlap > 0.0))
        throw std::domain_error(
            "GCRE not computable: overlap estimate is not positive");
    return y_a * y_b / y_ab_overlap;
}

std::string EstimateReport::to_json() const {
    nlohmann::ordered_json j;
    j["day"] = day;
    j["scheme"] = scheme;
    j["Y_A_hat"] = y_a;
    j["Y_B_hat"] = y_b;
    j["Y_AB_A_hat"] = y_ab_a;
    j["Y_AB_B_hat"] = y_ab_b;
    j["alpha"] = alpha;
    j["alpha_clamped"] = alpha_clamped;
    j["alpha_policy"] = alpha_policy;
    j["Y_hat"] = y_hat;
    j["var_A"] = {{"first_stage", var_a.first_stage},
                  {"second_stage", var_a.second_stage},
                  {"total", var_a.total}};
    j["var_B"] = {{"first_stage", var_b.first_stage},
                  {"second_stage", var_b.second_stage},
                  {"total", var_b.total}};
    j["var_AB_A"] = var_ab_a;
    j["var_AB_B"] = var_ab_b;
    j["cov_A"] = cov_a;
    j["cov_B"] = cov_b;
    j["var_composite"] = var_composite.value;
    j["var_composite_floored"] = var_composite.floored;
    j["anchor_estimates_A"] = anchor_estimates_a;
    j["anchor_estimates_B"] = anchor_estimates_b;
    if (y_alt) j["Y_alt_hat"] = *y_alt;
    if (y_gcre) j["Y_GCRE_hat"] = *y_gcre;
    return j.dump(2);
}

namespace {

GwsmContact make_contact(const DayWorld& world, std::int32_t j) {
    GwsmContact c;
    c.person_id = j;
    c.y = world.infected[j] ? 1.0 : 0.0;
    c.links_verified = world.mult.verified_links[j];
    c.links_infected_complement = world.mult.infected_complement_links[j];
    c.links_total = world.mult.total_links[j];
    return c;
}

}  // namespace

BuiltSample build_group_a_input(const DayWorld& world, const Sample& first_stage,
                                const ContactScheme& scheme, RngStream& rng) {
    BuiltSample built;
    built.input.side = FrameOrigin::Verified;
    built.input.frame_size = static_cast<long long>(world.frames.verified.size());
    built.full_sample = first_stage;
    for (const SampleUnit& u : first_stage.units) {
        GwsmAnchor a;
        a.person_id = u.person_id;
        a.pi1 = u.pi1 * u.pi2.value_or(1.0);
        a.y_anchor = world.infected[u.person_id] ? 1.0 : 0.0;
        a.contact_pool_size = world.link.degree(u.person_id);
        ContactDraw draw = sample_contacts(u.person_id, world.link, scheme, rng);
        a.pi2 = draw.pi2;
        for (std::int32_t j : draw.contacts) {
            a.contacts.push_back(make_contact(world, j));
            SampleUnit cu;
            cu.person_id = j;
            cu.pi1 = a.pi1;
            cu.pi2 = draw.pi2;
            cu.origin = FrameOrigin::Verified;
            cu.anchor_id = u.person_id;
            built.full_sample.units.push_back(cu);
        }
        built.input.anchors.push_back(std::move(a));
    }
    return built;
}

BuiltSample build_group_b_input(const DayWorld& world, const Sample& panel,
                                const ContactScheme& scheme, RngStream& rng) {
    BuiltSample built;
    built.input.side = FrameOrigin::Complement;
    built.input.frame_size = static_cast<long long>(world.frames.complement.size());
    built.full_sample = panel;
    for (const SampleUnit& u : panel.units) {
        GwsmAnchor a;
        a.person_id = u.person_id;
        a.pi1 = u.pi1 * u.pi2.value_or(1.0);
        a.y_anchor = world.infected[u.person_id] ? 1.0 : 0.0;
        a.contact_pool_size = world.link.degree(u.person_id);
        if (a.y_anchor > 0.0) {  // contacts are tracked only on a positive test
            ContactDraw draw = sample_contacts(u.person_id, world.link, scheme, rng);
            a.pi2 = draw.pi2;
            for (std::int32_t j : draw.contacts) {
                a.contacts.push_back(make_contact(world, j));
                SampleUnit cu;
                cu.person_id = j;
                cu.pi1 = a.pi1;
                cu.pi2 = draw.pi2;
                cu.origin = FrameOrigin::Complement;
                cu.anchor_id = u.person_id;
                built.full_sample.units.push_back(cu);
            }
        }
        built.input.anchors.push_back(std::move(a));
    }
    return built;
}

}  // namespace episample
