#include "episample/designs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace episample {

ContactScheme ContactScheme::fraction(double g) {
    if (g <= 0.0 || g > 1.0)
        throw std::invalid_argument("contact fraction g must be in (0,1]");
    return ContactScheme(Mode::Fraction, g, 0);
}

ContactScheme ContactScheme::cap(int nu) {
    if (nu < 1) throw std::invalid_argument("contact cap must be positive");
    return ContactScheme(Mode::Cap, 1.0, nu);
}

namespace {

// Selection sampling (Fan/Knuth): scan once, keep each survivor with
// probability (still needed)/(still available). Uniform over subsets.
std::vector<std::int32_t> srswor_ids(const std::vector<std::int32_t>& frame, int n,
                                     RngStream& rng) {
    std::vector<std::int32_t> out;
    out.reserve(n);
    const int N = static_cast<int>(frame.size());
    int taken = 0;
    for (int i = 0; i < N && taken < n; ++i) {
        const double p = static_cast<double>(n - taken) / (N - i);
        if (rng.uniform() < p) {
            out.push_back(frame[i]);
            ++taken;
        }
    }
    return out;
}

}  // namespace

Sample srswor(const std::vector<std::int32_t>& frame, int n, RngStream& rng,
              FrameOrigin origin, const std::string& label) {
    const int N = static_cast<int>(frame.size());
    if (n < 1 || n > N)
        throw std::invalid_argument("srswor: need 0 < n <= frame size");
    Sample s;
    s.design_label = label;
    const double pi = static_cast<double>(n) / N;
    for (std::int32_t id : srswor_ids(frame, n, rng)) {
        SampleUnit u;
        u.person_id = id;
        u.pi1 = pi;
        u.origin = origin;
        s.units.push_back(u);
    }
    return s;
}

double self_weighting_pi(int m_institutions, long long institution_size,
                         long long total_size, int n_bar) {
    if (m_institutions < 1)
        throw std::invalid_argument("need at least one institution");
    if (n_bar < 1 || n_bar > institution_size)
        throw std::invalid_argument("second stage n_bar infeasible");
    if (institution_size > total_size)
        throw std::invalid_argument("institution larger than total");
    const double pi = static_cast<double>(m_institutions) * n_bar / total_size;
    if (pi > 1.0) throw std::invalid_argument("over-sampling: pi > 1");
    return pi;
}

Sample two_stage_institution_sample(
    const std::vector<std::vector<std::int32_t>>& institutions, int m_institutions,
    int n_bar, RngStream& rng, FrameOrigin origin, const std::string& label) {
    const int I = static_cast<int>(institutions.size());
    if (m_institutions < 1 || m_institutions > I)
        throw std::invalid_argument("first stage size infeasible");
    long long total = 0;
    for (const auto& inst : institutions) {
        if (static_cast<int>(inst.size()) < n_bar)
            throw std::invalid_argument("institution smaller than n_bar");
        total += static_cast<long long>(inst.size());
    }
    for (const auto& inst : institutions) {
        const double pi1 =
            static_cast<double>(m_institutions) * inst.size() / total;
        if (pi1 > 1.0)
            throw std::invalid_argument(
                "institution too large for PPS: first-stage pi > 1; "
                "certainty-select it before sampling");
    }

    // systematic PPS on a randomly permuted institution list
    std::vector<int> order(I);
    std::iota(order.begin(), order.end(), 0);
    for (int i = I - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_int(0, i)]);

    const double step = static_cast<double>(total) / m_institutions;
    const double start = rng.uniform(0.0, step);
    std::vector<int> chosen;
    double cum = 0.0;
    int t = 0;
    for (int idx : order) {
        const double next = cum + static_cast<double>(institutions[idx].size());
        while (t < m_institutions && start + t * step < next) {
            if (start + t * step >= cum) chosen.push_back(idx);
            ++t;
        }
        cum = next;
        if (t >= m_institutions) break;
    }

    Sample s;
    s.design_label = label;
    for (int idx : chosen) {
        const auto& inst = institutions[idx];
        const double pi1 =
            static_cast<double>(m_institutions) * inst.size() / total;
        const double pi2 = static_cast<double>(n_bar) / inst.size();
        for (std::int32_t id : srswor_ids(inst, n_bar, rng)) {
            SampleUnit u;
            u.person_id = id;
            u.pi1 = pi1;
            u.pi2 = pi2;
            u.origin = origin;
            s.units.push_back(u);
        }
    }
    return s;
}

ContactDraw sample_contacts(std::int32_t anchor_id, const LinkView& link,
                            const ContactScheme& scheme, RngStream& rng) {
    const auto& pool = link.contacts_of(anchor_id);
    const int M = static_cast<int>(pool.size());
    ContactDraw draw;
    switch (scheme.mode()) {
        case ContactScheme::Mode::All:
            draw.contacts = pool;
            draw.pi2 = 1.0;
            return draw;
        case ContactScheme::Mode::Fraction: {
            // round half up, floor of one: a traced anchor contributes itself
            int m = static_cast<int>(std::floor(scheme.g() * M + 0.5));
            m = std::max(1, std::min(m, M));
            if (m == M) {
                draw.contacts = pool;
                draw.pi2 = 1.0;
            } else {
                draw.contacts = srswor_ids(pool, m, rng);
                draw.pi2 = static_cast<double>(m) / M;
            }
            return draw;
        }
        case ContactScheme::Mode::Cap: {
            if (M <= scheme.nu()) {
                draw.contacts = pool;
                draw.pi2 = 1.0;
            } else {
                draw.contacts = srswor_ids(pool, scheme.nu(), rng);
                draw.pi2 = static_cast<double>(scheme.nu()) / M;
            }
            return draw;
        }
    }
    throw std::logic_error("unreachable contact scheme mode");
}

Sample select_panel(const std::vector<std::int32_t>& complement_frame, int n,
                    RngStream& rng, const PanelStrata* strata,
                    const std::string& label) {
    if (strata == nullptr)
        return srswor(complement_frame, n, rng, FrameOrigin::Complement, label);

    const int N = static_cast<int>(complement_frame.size());
    if (n < 1 || n > N)
        throw std::invalid_argument("select_panel: need 0 < n <= frame size");

    std::vector<std::vector<std::int32_t>> by_stratum(PanelStrata::kNumStrata);
    for (std::int32_t id : complement_frame) {
        const int h = strata->label_by_person.at(id);
        if (h < 0 || h >= PanelStrata::kNumStrata)
            throw std::invalid_argument("stratum label out of range");
        by_stratum[h].push_back(id);
    }

    // proportional allocation, remainders to the largest fractional parts
    std::vector<int> alloc(PanelStrata::kNumStrata, 0);
    std::vector<std::pair<double, int>> remainder;
    int assigned = 0;
    for (int h = 0; h < PanelStrata::kNumStrata; ++h) {
        const double exact =
            static_cast<double>(n) * by_stratum[h].size() / N;
        alloc[h] = static_cast<int>(std::floor(exact));
        assigned += alloc[h];
        remainder.push_back({exact - alloc[h], h});
    }
    std::stable_sort(remainder.begin(), remainder.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int i = 0; assigned < n; ++i) {
        const int h = remainder[i % PanelStrata::kNumStrata].second;
        if (static_cast<int>(by_stratum[h].size()) > alloc[h]) {
            ++alloc[h];
            ++assigned;
        }
    }
    for (int h = 0; h < PanelStrata::kNumStrata; ++h) {
        if (alloc[h] > 0 && by_stratum[h].empty())
            throw std::invalid_argument("positive allocation to empty stratum");
    }

    Sample s;
    s.design_label = label;
    for (int h = 0; h < PanelStrata::kNumStrata; ++h) {
        if (alloc[h] == 0) continue;
        const double pi =
            static_cast<double>(alloc[h]) / by_stratum[h].size();
        for (std::int32_t id : srswor_ids(by_stratum[h], alloc[h], rng)) {
            SampleUnit u;
            u.person_id = id;
            u.pi1 = pi;
            u.origin = FrameOrigin::Complement;
            s.units.push_back(u);
        }
    }
    return s;
}

int sample_size_for_proportion(double p, double target_cv) {
    if (p <= 0.0 || p >= 1.0)
        throw std::invalid_argument("proportion must be in (0,1)");
    if (target_cv <= 0.0)
        throw std::invalid_argument("target CV must be positive");
    const double n = (1.0 - p) / (p * target_cv * target_cv);
    return std::max(1, static_cast<int>(std::ceil(n - 1e-12)));
}

double cv_for_sample_size(double p, int n) {
    if (p <= 0.0 || p >= 1.0)
        throw std::invalid_argument("proportion must be in (0,1)");
    if (n < 1) throw std::invalid_argument("sample size must be positive");
    return std::sqrt(p * (1.0 - p) / n) / p;
}

BalanceReport balance_check(const Sample& sample,
                            const std::vector<std::string>& aux_names,
                            const std::vector<std::vector<double>>& aux_by_person,
                            const std::vector<std::int32_t>& frame) {
    const std::size_t P = aux_names.size();
    BalanceReport report;
    for (std::size_t v = 0; v < P; ++v) {
        BalanceEntry e;
        e.name = aux_names[v];
        for (std::int32_t id : frame) e.frame_total += aux_by_person.at(id).at(v);
        for (const SampleUnit& u : sample.units)
            e.ht_total += aux_by_person.at(u.person_id).at(v) * u.weight();
        e.rel_deviation = e.frame_total != 0.0
                              ? (e.ht_total - e.frame_total) / e.frame_total
                              : e.ht_total;
        report.entries.push_back(e);
    }
    return report;
}

std::string sample_to_csv(const Sample& sample) {
    std::string out = "person_id,pi1,pi2,origin_frame,anchor_id,design_label\n";
    char buf[64];
    for (const SampleUnit& u : sample.units) {
        out += std::to_string(u.person_id);
        std::snprintf(buf, sizeof(buf), ",%.17g,", u.pi1);
        out += buf;
        if (u.pi2) {
            std::snprintf(buf, sizeof(buf), "%.17g", *u.pi2);
            out += buf;
        }
        out += ',';
        out += static_cast<char>(u.origin);
        out += ',';
        if (u.anchor_id) out += std::to_string(*u.anchor_id);
        out += ',';
        out += sample.design_label;
        out += '\n';
    }
    return out;
}

}  // namespace episample
