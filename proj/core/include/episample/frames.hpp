#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "episample/synthpop.hpp"

namespace episample {

/// Symmetric link matrix over a trailing contact window, stored as
/// per-person adjacency (sorted, unique, self-link always present).
struct LinkView {
    int reference_day = 0;
    int window_length = 14;
    int first_day = 1;  // window is [first_day, reference_day], inclusive
    std::vector<std::vector<std::int32_t>> adjacency;

    int n_persons() const { return static_cast<int>(adjacency.size()); }
    const std::vector<std::int32_t>& contacts_of(int person) const {
        return adjacency[person];
    }
    /// Row degree including the self-link (L_j).
    int degree(int person) const {
        return static_cast<int>(adjacency[person].size());
    }
    bool linked(int a, int b) const;
};

/// Sampling frames at a reference day. Dead persons belong to neither
/// frame; their historical links stay visible in the LinkView.
struct Frames {
    int reference_day = 0;
    std::vector<std::int32_t> verified;    // U_v
    std::vector<std::int32_t> complement;  // U_c
};

/// Per-person link multiplicities at the reference day.
///   verified_links[j]  = #{k in U_v : l_{k,j} = 1}
///   infected_complement_links[j] = #{k in U_c : y_k = 1 and l_{k,j} = 1}
///   total_links[j]     = row degree of j including self
struct Multiplicities {
    std::vector<int> verified_links;             // L_vj
    std::vector<int> infected_complement_links;  // L_Cj
    std::vector<int> total_links;                // L_j
};

struct GroundTruth {
    long long total_infected = 0;    // Y
    long long group_a = 0;           // Y_A
    long long group_b = 0;           // Y_B
    long long overlap = 0;           // Y_AB

    bool operator==(const GroundTruth&) const = default;
};

/// Adjacency over the closed window of `window_length` days ending at
/// reference_day. Windows reaching before day 1 are truncated, not errors.
LinkView link_window(const std::vector<ContactRecord>& contact_log, int n_persons,
                     int reference_day, int window_length = 14);

Frames build_frames(const EpidemicTrace& trace, int reference_day);

/// Multiplicities over an explicit mark vector (y_k per person). The wave
/// machinery reuses this with change marks in place of infection marks.
Multiplicities compute_multiplicities(const std::vector<char>& marks,
                                      const Frames& frames, const LinkView& link);

Multiplicities compute_multiplicities(const EpidemicTrace& trace,
                                      const Frames& frames, const LinkView& link);

/// Exact totals. The overlap is computed by three independent routes
/// (set membership and the two frame-side multiplicity sums) and must
/// agree exactly; disagreement is an internal consistency fault.
GroundTruth true_totals(const std::vector<char>& marks, const Frames& frames,
                        const LinkView& link, const Multiplicities& mult);

GroundTruth true_totals(const EpidemicTrace& trace, const Frames& frames,
                        const LinkView& link, const Multiplicities& mult);

/// JSON object keyed Y_A, Y_B, Y_AB, Y.
std::string ground_truth_json(const GroundTruth& gt);

/// Everything the estimation stages need about one reference day.
struct DayWorld {
    int day = 0;
    LinkView link;
    Frames frames;
    Multiplicities mult;
    GroundTruth truth;
    std::vector<char> infected;  // y_k at the reference day
    std::vector<char> alive;

    int n_persons() const { return static_cast<int>(infected.size()); }
};

DayWorld build_day_world(const EpidemicTrace& trace, int day, int window_length = 14);

/// Assembles a world from explicit frames and marks over a prebuilt link
/// view. Used for wave-to-wave change estimation.
DayWorld build_marked_world(const LinkView& link, Frames frames,
                            std::vector<char> marks, std::vector<char> alive);

}  // namespace episample
