#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "episample/rng.hpp"

namespace episample {

/// Six-state health model. Transitions follow only
/// S->E, E->I, E->A, I->R, I->D, A->R; R and D are absorbing.
enum class HealthState : std::uint8_t {
    Susceptible = 0,
    Exposed = 1,
    InfectedSymptomatic = 2,
    Asymptomatic = 3,
    Recovered = 4,
    Dead = 5,
};

constexpr int kNumHealthStates = 6;

char state_code(HealthState s);
HealthState state_from_code(char c);

/// True while the person carries the infection (E, I or A).
inline bool is_infected(HealthState s) {
    return s == HealthState::Exposed || s == HealthState::InfectedSymptomatic ||
           s == HealthState::Asymptomatic;
}

/// True if the person transmits in meetings. Symptomatic cases do not
/// transmit here: contagion is driven by exposed and asymptomatic carriers.
inline bool is_contagious(HealthState s) {
    return s == HealthState::Exposed || s == HealthState::Asymptomatic;
}

/// Per-phase mixing and mobility parameters.
struct PhaseParams {
    double mobility_fraction = 0.03;   // share of people relocating per day
    int movement_extent = 4;           // offsets drawn from [-extent, extent]
    double meetings_per_cell_rate = 20.0;  // c_n, Poisson mean
    double movers_rate = 5.0;          // c_p, Poisson mean; meeting size = c_p draw + 1
    int infections_per_meeting = 3;    // i_m
};

struct SimConfig {
    int grid_rows = 5;
    int grid_cols = 5;
    int cell_pop_min = 800;
    int cell_pop_max = 1000;
    int phase1_days = 28;
    int phase2_days = 56;
    PhaseParams phase1{0.03, 4, 20.0, 5.0, 3};
    PhaseParams phase2{0.01, 1, 3.0, 3.0, 2};
    int incubation_days = 5;
    double p_symptomatic = 0.25;
    int asymptomatic_infectious_days = 14;
    int symptomatic_infectious_days = 14;
    double p_recover_symptomatic = 0.85;
    int initial_exposed = 10;
    std::uint64_t rng_seed = 42;

    int horizon_days() const { return phase1_days + phase2_days; }
    const PhaseParams& phase(int day) const {
        return day <= phase1_days ? phase1 : phase2;
    }
    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

struct Person {
    std::int32_t id = 0;
    std::int16_t row = 0;
    std::int16_t col = 0;
    HealthState state = HealthState::Susceptible;
    std::int32_t state_entry_day = 0;
    std::int32_t verified_day = -1;  // day the case was ascertained; -1 = never

    bool verified_by(int day) const {
        return verified_day >= 0 && verified_day <= day;
    }
};

struct Population {
    int rows = 0;
    int cols = 0;
    std::vector<Person> people;

    int size() const { return static_cast<int>(people.size()); }
    int cell_index(int r, int c) const { return r * cols + c; }
};

struct ContactRecord {
    std::int32_t day;
    std::int32_t a;
    std::int32_t b;

    bool operator==(const ContactRecord&) const = default;
};

using StateCounts = std::array<int, kNumHealthStates>;

/// Outcome of one simulated day.
struct DayLog {
    int day = 0;
    std::vector<std::pair<std::int32_t, std::int32_t>> contacts;
    int new_exposed = 0;
    int new_symptomatic = 0;
    int new_asymptomatic = 0;
    int new_recovered = 0;
    int new_dead = 0;
    int movers = 0;
};

/// Ground-truth world: per-day states and cells for every person plus the
/// time-stamped contact log.
struct EpidemicTrace {
    int n_persons = 0;
    int days = 0;
    int rows = 0;
    int cols = 0;
    // day-major snapshots taken at the end of each day; index day-1
    std::vector<std::vector<std::uint8_t>> states;
    std::vector<std::vector<std::uint16_t>> cells;
    std::vector<ContactRecord> contacts;
    std::vector<std::int32_t> verified_day;  // -1 = never verified

    HealthState state_of(int person, int day) const {
        return static_cast<HealthState>(states[day - 1][person]);
    }
    int cell_of(int person, int day) const { return cells[day - 1][person]; }
    int cell_row_of(int person, int day) const { return cell_of(person, day) / cols; }
    int cell_col_of(int person, int day) const { return cell_of(person, day) % cols; }
    /// y_k at the given day: 1 if the person is infected (E, I or A).
    bool infected_at(int person, int day) const {
        return is_infected(state_of(person, day));
    }
    StateCounts counts(int day) const;

    bool operator==(const EpidemicTrace&) const = default;
};

/// Draws each cell's size uniformly from [cell_pop_min, cell_pop_max] and
/// seeds `initial_exposed` index cases uniformly at random.
Population generate_population(const SimConfig& config, RngStream& rng);

/// Advances the population by one day: movement, meetings with contagion,
/// timed state transitions, verification of new symptomatic cases.
DayLog step_day(Population& pop, const SimConfig& config, int day, RngStream& rng);

/// Runs the full two-phase epidemic. Deterministic given config.rng_seed.
EpidemicTrace run_epidemic(const SimConfig& config);

/// Trace persistence. CSV with mandatory headers
///   states: day,person_id,state,cell_row,cell_col
///   contacts: day,person_a,person_b
/// Round-trips losslessly.
void save_trace(const EpidemicTrace& trace, const std::string& states_path,
                const std::string& contacts_path);
EpidemicTrace load_trace(const std::string& states_path,
                         const std::string& contacts_path);

}  // namespace episample
