#include "episample/waves.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

namespace episample {

WaveDelta decompose_delta(const EpidemicTrace& trace, int t0, int t1) {
    if (t0 < 1 || t1 > trace.days)
        throw std::invalid_argument("wave days outside trace");
    if (t1 < t0) throw std::invalid_argument("t1 must not precede t0");
    WaveDelta d;
    for (int p = 0; p < trace.n_persons; ++p) {
        const bool inf0 = trace.infected_at(p, t0);
        const HealthState s1 = trace.state_of(p, t1);
        if (inf0) {
            if (s1 == HealthState::Dead) ++d.deaths;
            if (s1 == HealthState::Recovered) ++d.healings;
        } else if (is_infected(s1)) {
            ++d.new_infections;
        }
    }
    long long y0 = 0, y1 = 0;
    for (int p = 0; p < trace.n_persons; ++p) {
        y0 += trace.infected_at(p, t0) ? 1 : 0;
        y1 += trace.infected_at(p, t1) ? 1 : 0;
    }
    if (y1 != y0 - d.deaths - d.healings + d.new_infections)
        throw std::logic_error("wave identity violated by the trace");
    return d;
}

namespace {

struct CompositeParts {
    double y_a = 0.0, y_b = 0.0, y_ab_a = 0.0, y_ab_b = 0.0;
    double value = 0.0;
    double alpha = 0.5;
};

double choose_alpha(const GwsmInput& in_a, const GwsmInput& in_b,
                    const GwsmEstimate& a, const GwsmEstimate& ab_a,
                    const GwsmEstimate& b, const GwsmEstimate& ab_b,
                    AlphaPolicy policy, double alpha_fixed) {
    switch (policy) {
        case AlphaPolicy::Fixed:
            return alpha_fixed;
        case AlphaPolicy::Star:
            return alpha_star(variance_two_stage(in_a, a).total,
                              variance_two_stage(in_b, b).total);
        case AlphaPolicy::Opt:
            return alpha_opt(variance_two_stage(in_a, a).total,
                             variance_two_stage(in_b, b).total,
                             covariance_two_stage(in_a, a, ab_a),
                             covariance_two_stage(in_b, b, ab_b))
                .value;
        case AlphaPolicy::MinVariance:
            return alpha_min_variance(variance_two_stage(in_a, ab_a).total,
                                      variance_two_stage(in_b, ab_b).total,
                                      covariance_two_stage(in_a, a, ab_a),
                                      covariance_two_stage(in_b, b, ab_b))
                .value;
    }
    throw std::logic_error("unreachable alpha policy");
}

CompositeParts composite_from_inputs(const GwsmInput& in_a, const GwsmInput& in_b,
                                     AlphaPolicy policy, double alpha_fixed) {
    CompositeParts parts;
    const GwsmEstimate a = estimate_group_a(in_a);
    const GwsmEstimate ab_a = estimate_overlap(in_a);
    const GwsmEstimate b = estimate_group_b(in_b);
    const GwsmEstimate ab_b = estimate_overlap(in_b);
    parts.y_a = a.total;
    parts.y_b = b.total;
    parts.y_ab_a = ab_a.total;
    parts.y_ab_b = ab_b.total;
    parts.alpha = choose_alpha(in_a, in_b, a, ab_a, b, ab_b, policy, alpha_fixed);
    parts.value =
        composite(parts.y_a, parts.y_b, parts.y_ab_a, parts.y_ab_b, parts.alpha);
    return parts;
}

/// Same anchors, weights and multiplicities; only the observation marks
/// change. This is the follow-up re-read of previously captured units.
GwsmInput remark_input(const GwsmInput& base, const std::vector<char>& marks) {
    GwsmInput out = base;
    for (GwsmAnchor& a : out.anchors)
        for (GwsmContact& c : a.contacts) c.y = marks[c.person_id] ? 1.0 : 0.0;
    return out;
}

Sample census_of(const std::vector<std::int32_t>& frame, FrameOrigin origin,
                 const std::string& label) {
    Sample s;
    s.design_label = label;
    for (std::int32_t id : frame) {
        SampleUnit u;
        u.person_id = id;
        u.pi1 = 1.0;
        u.origin = origin;
        s.units.push_back(u);
    }
    return s;
}

Sample draw_first_stage(const std::vector<std::int32_t>& frame, int requested,
                        FrameOrigin origin, const std::string& label,
                        RngStream& rng) {
    if (frame.empty()) return Sample{label, {}};
    const int size = static_cast<int>(frame.size());
    int n = requested <= 0 ? size : std::min(requested, size);
    n = std::max(n, std::min(2, size));  // keep variances estimable
    if (n >= size) return census_of(frame, origin, label);
    return srswor(frame, n, rng, origin, label);
}

}  // namespace

std::vector<WaveRow> run_waves(const EpidemicTrace& trace, const WaveConfig& cfg,
                               std::uint64_t seed) {
    if (cfg.start_day < 1 ||
        cfg.start_day + cfg.follow_ups * cfg.interval > trace.days)
        throw std::invalid_argument("wave schedule outside trace horizon");
    if (cfg.interval < 1) throw std::invalid_argument("wave interval must be >= 1");

    std::vector<WaveRow> rows;

    // wave 0: plain cross-section
    DayWorld world = build_day_world(trace, cfg.start_day, cfg.window_length);
    RngStream rng0(derive_seed(seed, 0xA11CE, 0));
    Sample sv = draw_first_stage(world.frames.verified, cfg.n_verified,
                                 FrameOrigin::Verified, "wave-sv", rng0);
    Sample panel = draw_first_stage(world.frames.complement, cfg.n_panel,
                                    FrameOrigin::Complement, "wave-panel", rng0);
    BuiltSample built_a = build_group_a_input(world, sv, cfg.scheme_a, rng0);
    BuiltSample built_b = build_group_b_input(world, panel, cfg.scheme_b, rng0);
    CompositeParts cross = composite_from_inputs(built_a.input, built_b.input,
                                                 cfg.alpha_policy, cfg.alpha_fixed);

    WaveRow first;
    first.wave = 0;
    first.day = cfg.start_day;
    first.y_hat = cross.value;
    first.y_true = world.truth.total_infected;
    rows.push_back(first);

    double y_prev = cross.value;
    int prev_day = cfg.start_day;
    Sample cumulative_sv = sv;

    for (int wave = 1; wave <= cfg.follow_ups; ++wave) {
        const int day = cfg.start_day + wave * cfg.interval;
        RngStream rng(derive_seed(seed, 0xA11CE, wave));

        // (1) deaths and healings among previously captured infected units,
        // frozen weights and multiplicities from the prior wave
        std::vector<char> mark_d(trace.n_persons, 0), mark_h(trace.n_persons, 0);
        for (int p = 0; p < trace.n_persons; ++p) {
            if (!trace.infected_at(p, prev_day)) continue;
            const HealthState s = trace.state_of(p, day);
            if (s == HealthState::Dead) mark_d[p] = 1;
            if (s == HealthState::Recovered) mark_h[p] = 1;
        }
        const CompositeParts dd = composite_from_inputs(
            remark_input(built_a.input, mark_d), remark_input(built_b.input, mark_d),
            cfg.alpha_policy, cfg.alpha_fixed);
        const CompositeParts dh = composite_from_inputs(
            remark_input(built_a.input, mark_h), remark_input(built_b.input, mark_h),
            cfg.alpha_policy, cfg.alpha_fixed);

        // (2) new infections: newly verified frame plus the panel's newly
        // positive members, contact-traced at the current day
        LinkView link_t = link_window(trace.contacts, trace.n_persons, day,
                                      cfg.window_length);
        std::vector<char> alive_t(trace.n_persons), delta_marks(trace.n_persons);
        for (int p = 0; p < trace.n_persons; ++p) {
            alive_t[p] = trace.state_of(p, day) != HealthState::Dead ? 1 : 0;
            delta_marks[p] =
                (!trace.infected_at(p, prev_day) && trace.infected_at(p, day)) ? 1
                                                                               : 0;
        }
        Frames delta_frames;
        delta_frames.reference_day = day;
        for (int p = 0; p < trace.n_persons; ++p) {
            if (!alive_t[p]) continue;
            const int vd = trace.verified_day[p];
            if (vd > prev_day && vd <= day)
                delta_frames.verified.push_back(p);
            else if (vd < 0 || vd > day)
                delta_frames.complement.push_back(p);
        }
        DayWorld delta_world =
            build_marked_world(link_t, delta_frames, delta_marks, alive_t);

        Sample delta_sv = draw_first_stage(delta_world.frames.verified,
                                           cfg.n_verified, FrameOrigin::Verified,
                                           "wave-delta-sv", rng);

        // panel update before testing: members who entered U_v or died leave
        Sample tested_panel;
        tested_panel.design_label = panel.design_label;
        for (const SampleUnit& u : panel.units) {
            if (!alive_t[u.person_id]) continue;
            const int vd = trace.verified_day[u.person_id];
            if (vd >= 0 && vd <= day) continue;
            tested_panel.units.push_back(u);
        }

        BuiltSample delta_a =
            build_group_a_input(delta_world, delta_sv, cfg.scheme_a, rng);
        BuiltSample delta_b =
            build_group_b_input(delta_world, tested_panel, cfg.scheme_b, rng);
        const CompositeParts dy = composite_from_inputs(
            delta_a.input, delta_b.input, cfg.alpha_policy, cfg.alpha_fixed);

        // (3) chain update
        y_prev = chain_estimate(y_prev, dd.value, dh.value, dy.value);

        WaveRow row;
        row.wave = wave;
        row.day = day;
        row.y_hat = y_prev;
        row.deaths_hat = dd.value;
        row.healings_hat = dh.value;
        row.new_infections_hat = dy.value;

        // (4) refresh: top up the panel from the current complement frame
        DayWorld full_world = build_day_world(trace, day, cfg.window_length);
        row.y_true = full_world.truth.total_infected;
        rows.push_back(row);

        const int target = cfg.n_panel <= 0
                               ? static_cast<int>(full_world.frames.complement.size())
                               : cfg.n_panel;
        std::unordered_set<std::int32_t> in_panel;
        for (const SampleUnit& u : tested_panel.units) in_panel.insert(u.person_id);
        std::vector<std::int32_t> candidates;
        for (std::int32_t id : full_world.frames.complement)
            if (!in_panel.count(id)) candidates.push_back(id);
        const int need = std::min<int>(target - static_cast<int>(in_panel.size()),
                                       static_cast<int>(candidates.size()));
        Sample refreshed = tested_panel;
        if (need > 0) {
            Sample topup = draw_first_stage(candidates, need,
                                            FrameOrigin::Complement,
                                            panel.design_label, rng);
            for (const SampleUnit& u : topup.units) refreshed.units.push_back(u);
        }
        panel = refreshed;

        // cumulative verified-frame sample: prior units still alive plus the
        // fresh wave draw; used to follow up statuses at the next wave
        Sample next_sv;
        next_sv.design_label = cumulative_sv.design_label;
        for (const SampleUnit& u : cumulative_sv.units)
            if (alive_t[u.person_id]) next_sv.units.push_back(u);
        for (const SampleUnit& u : delta_sv.units) next_sv.units.push_back(u);
        cumulative_sv = next_sv;

        built_a = build_group_a_input(full_world, cumulative_sv, cfg.scheme_a, rng);
        built_b = build_group_b_input(full_world, panel, cfg.scheme_b, rng);
        prev_day = day;
    }
    return rows;
}

std::string wave_report_csv(const std::vector<WaveRow>& rows) {
    std::string out = "t,Y_hat,dD_hat,dH_hat,dY_hat,Y_true\n";
    char buf[192];
    for (const WaveRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%lld\n", r.wave,
                      r.y_hat, r.deaths_hat, r.healings_hat, r.new_infections_hat,
                      r.y_true);
        out += buf;
    }
    return out;
}

}  // namespace episample
