#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "episample/frames.hpp"
#include "episample/rng.hpp"

namespace episample {

enum class FrameOrigin : char { Verified = 'V', Complement = 'C' };

struct SampleUnit {
    std::int32_t person_id = -1;
    double pi1 = 1.0;
    std::optional<double> pi2;            // absent for first-stage units
    FrameOrigin origin = FrameOrigin::Verified;
    std::optional<std::int32_t> anchor_id;  // set for traced contact units

    double weight() const { return 1.0 / (pi1 * pi2.value_or(1.0)); }
};

struct Sample {
    std::string design_label;
    std::vector<SampleUnit> units;
};

/// Second-stage contact selection rule. Exactly one mode is active.
class ContactScheme {
  public:
    enum class Mode { All, Fraction, Cap };

    static ContactScheme all() { return ContactScheme(Mode::All, 1.0, 0); }
    static ContactScheme fraction(double g);
    static ContactScheme cap(int nu);

    Mode mode() const { return mode_; }
    double g() const { return g_; }
    int nu() const { return nu_; }

  private:
    ContactScheme(Mode m, double g, int nu) : mode_(m), g_(g), nu_(nu) {}
    Mode mode_;
    double g_;
    int nu_;
};

/// Simple random sample without replacement; every unit gets pi = n/#frame.
Sample srswor(const std::vector<std::int32_t>& frame, int n, RngStream& rng,
              FrameOrigin origin = FrameOrigin::Verified,
              const std::string& label = "srswor");

/// Final inclusion probability of the two-stage institution design,
/// m * (M_i/M) * (n_bar/M_i) = m*n_bar/M. Independent of M_i.
double self_weighting_pi(int m_institutions, long long institution_size,
                         long long total_size, int n_bar);

/// PPS-without-replacement first stage (systematic, on a random permutation)
/// followed by SRSWOR of n_bar per selected institution. Self-weighting.
Sample two_stage_institution_sample(
    const std::vector<std::vector<std::int32_t>>& institutions, int m_institutions,
    int n_bar, RngStream& rng, FrameOrigin origin = FrameOrigin::Verified,
    const std::string& label = "two-stage");

struct ContactDraw {
    std::vector<std::int32_t> contacts;
    double pi2 = 1.0;
};

/// Selects from the anchor's contact set (which includes the anchor itself)
/// with equal within-anchor probabilities, per the scheme mode.
ContactDraw sample_contacts(std::int32_t anchor_id, const LinkView& link,
                            const ContactScheme& scheme, RngStream& rng);

/// Stratum labels for the panel: low/high risk x low/high mobility.
struct PanelStrata {
    std::vector<std::int8_t> label_by_person;  // values in [0, 4)
    static constexpr int kNumStrata = 4;
};

/// SRSWOR panel from U_c, or proportionally allocated SRSWOR within the
/// four strata when labels are supplied.
Sample select_panel(const std::vector<std::int32_t>& complement_frame, int n,
                    RngStream& rng, const PanelStrata* strata = nullptr,
                    const std::string& label = "panel");

/// Smallest n with sqrt(p(1-p)/n)/p <= target_cv.
int sample_size_for_proportion(double p, double target_cv);

/// Coefficient of variation of an estimated proportion p at sample size n.
double cv_for_sample_size(double p, int n);

struct BalanceEntry {
    std::string name;
    double ht_total = 0.0;
    double frame_total = 0.0;
    double rel_deviation = 0.0;
};

struct BalanceReport {
    std::vector<BalanceEntry> entries;
};

/// Diagnostic: how well the weighted sample reproduces known auxiliary
/// totals over the frame. Replaces balanced-selection machinery.
BalanceReport balance_check(const Sample& sample,
                            const std::vector<std::string>& aux_names,
                            const std::vector<std::vector<double>>& aux_by_person,
                            const std::vector<std::int32_t>& frame);

/// CSV export: person_id,pi1,pi2,origin_frame,anchor_id,design_label
std::string sample_to_csv(const Sample& sample);

}  // namespace episample
