#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "episample/estimators.hpp"

namespace episample {

/// Change between two reference times, stored as magnitudes. The chain
/// identity subtracts deaths and healings: Y1 = Y0 - dD - dH + dY.
struct WaveDelta {
    long long deaths = 0;          // infected at t0, dead at t1
    long long healings = 0;        // infected at t0, recovered at t1
    long long new_infections = 0;  // not infected at t0, infected at t1

    bool operator==(const WaveDelta&) const = default;
};

/// Exact decomposition from the trace. Allows t1 == t0 (all zeros);
/// throws on t1 < t0. Asserts the chain identity against the trace.
WaveDelta decompose_delta(const EpidemicTrace& trace, int t0, int t1);

/// One chain step with the signed convention.
inline double chain_estimate(double y_prev, double deaths_hat,
                             double healings_hat, double new_infections_hat) {
    return y_prev - deaths_hat - healings_hat + new_infections_hat;
}

struct WaveConfig {
    int start_day = 15;
    int interval = 10;
    int follow_ups = 5;    // waves after the initial cross-section
    int n_verified = 0;    // first-stage size; 0 = census of the frame
    int n_panel = 0;       // panel size; 0 = census of U_c
    ContactScheme scheme_a = ContactScheme::all();
    ContactScheme scheme_b = ContactScheme::all();
    AlphaPolicy alpha_policy = AlphaPolicy::Star;
    double alpha_fixed = 0.5;
    int window_length = 14;
};

struct WaveRow {
    int wave = 0;
    int day = 0;
    double y_hat = 0.0;
    double deaths_hat = 0.0;
    double healings_hat = 0.0;
    double new_infections_hat = 0.0;
    long long y_true = 0;
};

/// Runs the chain: a cross-sectional estimate at the start day, then per
/// wave (1) status follow-up of previously captured units under frozen
/// weights for the death/healing components, (2) a fresh sample of newly
/// verified cases plus the panel's newly positive members for the new
/// infections, (3) panel refresh.
std::vector<WaveRow> run_waves(const EpidemicTrace& trace, const WaveConfig& cfg,
                               std::uint64_t seed);

/// CSV: t,Y_hat,dD_hat,dH_hat,dY_hat,Y_true
std::string wave_report_csv(const std::vector<WaveRow>& rows);

}  // namespace episample
