#include "episample/frames.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace episample {

bool LinkView::linked(int a, int b) const {
    const auto& row = adjacency[a];
    return std::binary_search(row.begin(), row.end(), b);
}

LinkView link_window(const std::vector<ContactRecord>& contact_log, int n_persons,
                     int reference_day, int window_length) {
    if (reference_day < 1)
        throw std::invalid_argument("reference_day must be >= 1");
    if (window_length < 1)
        throw std::invalid_argument("window_length must be >= 1");

    LinkView link;
    link.reference_day = reference_day;
    link.window_length = window_length;
    link.first_day = std::max(1, reference_day - window_length + 1);
    link.adjacency.assign(n_persons, {});

    for (int p = 0; p < n_persons; ++p) link.adjacency[p].push_back(p);
    for (const ContactRecord& r : contact_log) {
        if (r.day < link.first_day || r.day > reference_day) continue;
        link.adjacency[r.a].push_back(r.b);
        link.adjacency[r.b].push_back(r.a);
    }
    for (auto& row : link.adjacency) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return link;
}

Frames build_frames(const EpidemicTrace& trace, int reference_day) {
    Frames frames;
    frames.reference_day = reference_day;
    for (int p = 0; p < trace.n_persons; ++p) {
        if (trace.state_of(p, reference_day) == HealthState::Dead) continue;
        const int vd = trace.verified_day[p];
        if (vd >= 0 && vd <= reference_day)
            frames.verified.push_back(p);
        else
            frames.complement.push_back(p);
    }
    return frames;
}

namespace {

std::vector<char> infection_marks(const EpidemicTrace& trace, int day) {
    std::vector<char> marks(trace.n_persons);
    for (int p = 0; p < trace.n_persons; ++p)
        marks[p] = trace.infected_at(p, day) ? 1 : 0;
    return marks;
}

long long round_checked(double v, const char* what) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-6)
        throw std::logic_error(std::string("non-integer total for ") + what);
    return static_cast<long long>(r);
}

}  // namespace

Multiplicities compute_multiplicities(const std::vector<char>& marks,
                                      const Frames& frames, const LinkView& link) {
    const int n = link.n_persons();
    Multiplicities mult;
    mult.verified_links.assign(n, 0);
    mult.infected_complement_links.assign(n, 0);
    mult.total_links.assign(n, 0);

    for (int k : frames.verified)
        for (int j : link.contacts_of(k)) ++mult.verified_links[j];
    for (int k : frames.complement) {
        if (!marks[k]) continue;
        for (int j : link.contacts_of(k)) ++mult.infected_complement_links[j];
    }
    for (int j = 0; j < n; ++j) mult.total_links[j] = link.degree(j);
    return mult;
}

Multiplicities compute_multiplicities(const EpidemicTrace& trace,
                                      const Frames& frames, const LinkView& link) {
    return compute_multiplicities(infection_marks(trace, frames.reference_day),
                                  frames, link);
}

GroundTruth true_totals(const std::vector<char>& marks, const Frames& frames,
                        const LinkView& link, const Multiplicities& mult) {
    const int n = link.n_persons();
    GroundTruth gt;

    for (int j = 0; j < n; ++j)
        if (marks[j]) ++gt.total_infected;

    // group A total: links from U_v, multiplicity-corrected
    double ya = 0.0;
    for (int k : frames.verified) {
        for (int j : link.contacts_of(k)) {
            if (!marks[j]) continue;
            ya += 1.0 / mult.verified_links[j];
        }
    }
    gt.group_a = round_checked(ya, "Y_A");

    // group B total: links from marked members of U_c
    double yb = 0.0;
    for (int k : frames.complement) {
        if (!marks[k]) continue;
        for (int j : link.contacts_of(k)) {
            if (!marks[j]) continue;
            yb += 1.0 / mult.infected_complement_links[j];
        }
    }
    gt.group_b = round_checked(yb, "Y_B");

    // overlap, computed three ways
    long long via_membership = 0;
    for (int j = 0; j < n; ++j) {
        if (!marks[j]) continue;
        if (mult.verified_links[j] >= 1 && mult.infected_complement_links[j] >= 1)
            ++via_membership;
    }
    double via_a = 0.0;
    for (int k : frames.verified) {
        for (int j : link.contacts_of(k)) {
            if (!marks[j]) continue;
            if (mult.infected_complement_links[j] >= 1)
                via_a += 1.0 / mult.verified_links[j];
        }
    }
    double via_b = 0.0;
    for (int k : frames.complement) {
        if (!marks[k]) continue;
        for (int j : link.contacts_of(k)) {
            if (!marks[j]) continue;
            if (mult.verified_links[j] >= 1)
                via_b += 1.0 / mult.infected_complement_links[j];
        }
    }
    const long long overlap_a = round_checked(via_a, "Y_AB (frame A route)");
    const long long overlap_b = round_checked(via_b, "Y_AB (frame B route)");
    if (via_membership != overlap_a || via_membership != overlap_b)
        throw std::logic_error("overlap totals disagree across routes");
    gt.overlap = via_membership;

    if (gt.total_infected != gt.group_a + gt.group_b - gt.overlap)
        throw std::logic_error("population breakdown identity violated");
    return gt;
}

GroundTruth true_totals(const EpidemicTrace& trace, const Frames& frames,
                        const LinkView& link, const Multiplicities& mult) {
    return true_totals(infection_marks(trace, frames.reference_day), frames, link,
                       mult);
}

std::string ground_truth_json(const GroundTruth& gt) {
    nlohmann::ordered_json j;
    j["Y_A"] = gt.group_a;
    j["Y_B"] = gt.group_b;
    j["Y_AB"] = gt.overlap;
    j["Y"] = gt.total_infected;
    return j.dump();
}

DayWorld build_day_world(const EpidemicTrace& trace, int day, int window_length) {
    if (day < 1 || day > trace.days)
        throw std::invalid_argument("reference day outside trace");
    DayWorld w;
    w.day = day;
    w.link = link_window(trace.contacts, trace.n_persons, day, window_length);
    w.frames = build_frames(trace, day);
    w.infected = infection_marks(trace, day);
    w.mult = compute_multiplicities(w.infected, w.frames, w.link);
    w.truth = true_totals(w.infected, w.frames, w.link, w.mult);
    w.alive.resize(trace.n_persons);
    for (int p = 0; p < trace.n_persons; ++p)
        w.alive[p] = trace.state_of(p, day) != HealthState::Dead ? 1 : 0;
    return w;
}

DayWorld build_marked_world(const LinkView& link, Frames frames,
                            std::vector<char> marks, std::vector<char> alive) {
    DayWorld w;
    w.day = link.reference_day;
    w.link = link;
    w.frames = std::move(frames);
    w.infected = std::move(marks);
    w.alive = std::move(alive);
    w.mult = compute_multiplicities(w.infected, w.frames, w.link);
    w.truth = true_totals(w.infected, w.frames, w.link, w.mult);
    return w;
}

}  // namespace episample
