#include "episample/synthpop.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace episample {

char state_code(HealthState s) {
    switch (s) {
        case HealthState::Susceptible: return 'S';
        case HealthState::Exposed: return 'E';
        case HealthState::InfectedSymptomatic: return 'I';
        case HealthState::Asymptomatic: return 'A';
        case HealthState::Recovered: return 'R';
        case HealthState::Dead: return 'D';
    }
    throw std::logic_error("unreachable health state");
}

HealthState state_from_code(char c) {
    switch (c) {
        case 'S': return HealthState::Susceptible;
        case 'E': return HealthState::Exposed;
        case 'I': return HealthState::InfectedSymptomatic;
        case 'A': return HealthState::Asymptomatic;
        case 'R': return HealthState::Recovered;
        case 'D': return HealthState::Dead;
    }
    throw std::invalid_argument(std::string("unknown state code: ") + c);
}

void SimConfig::validate() const {
    if (grid_rows < 1 || grid_cols < 1)
        throw std::invalid_argument("grid dimensions must be positive");
    if (cell_pop_min < 1 || cell_pop_max < cell_pop_min)
        throw std::invalid_argument("cell population range is empty");
    if (phase1_days < 1 || phase2_days < 0)
        throw std::invalid_argument("day counts must be positive");
    for (const PhaseParams* p : {&phase1, &phase2}) {
        if (p->mobility_fraction < 0.0 || p->mobility_fraction > 1.0)
            throw std::invalid_argument("mobility_fraction outside [0,1]");
        if (p->movement_extent < 0)
            throw std::invalid_argument("movement_extent must be nonnegative");
        if (p->meetings_per_cell_rate < 0.0 || p->movers_rate < 0.0)
            throw std::invalid_argument("Poisson rates must be nonnegative");
        if (p->infections_per_meeting < 0)
            throw std::invalid_argument("infections_per_meeting must be nonnegative");
    }
    if (incubation_days < 1 || asymptomatic_infectious_days < 1 ||
        symptomatic_infectious_days < 1)
        throw std::invalid_argument("state durations must be positive");
    if (p_symptomatic < 0.0 || p_symptomatic > 1.0)
        throw std::invalid_argument("p_symptomatic outside [0,1]");
    if (p_recover_symptomatic < 0.0 || p_recover_symptomatic > 1.0)
        throw std::invalid_argument("p_recover_symptomatic outside [0,1]");
    if (initial_exposed < 0)
        throw std::invalid_argument("initial_exposed must be nonnegative");
}

Population generate_population(const SimConfig& config, RngStream& rng) {
    config.validate();
    Population pop;
    pop.rows = config.grid_rows;
    pop.cols = config.grid_cols;
    std::int32_t next_id = 0;
    for (int r = 0; r < config.grid_rows; ++r) {
        for (int c = 0; c < config.grid_cols; ++c) {
            const int n = rng.uniform_int(config.cell_pop_min, config.cell_pop_max);
            for (int i = 0; i < n; ++i) {
                Person p;
                p.id = next_id++;
                p.row = static_cast<std::int16_t>(r);
                p.col = static_cast<std::int16_t>(c);
                pop.people.push_back(p);
            }
        }
    }
    if (config.initial_exposed > pop.size())
        throw std::invalid_argument("initial_exposed exceeds population size");
    // index cases, placed uniformly without replacement
    std::unordered_set<int> seeds;
    while (static_cast<int>(seeds.size()) < config.initial_exposed)
        seeds.insert(static_cast<int>(rng.index(pop.people.size())));
    for (int id : seeds) {
        pop.people[id].state = HealthState::Exposed;
        pop.people[id].state_entry_day = 0;
    }
    return pop;
}

namespace {

int clamp_coord(int v, int hi) { return std::max(0, std::min(v, hi)); }

// k distinct indices from [0, n) by rejection; k << n in practice.
void draw_distinct(int n, int k, RngStream& rng, std::vector<int>& out) {
    out.clear();
    if (k >= n) {
        out.resize(n);
        for (int i = 0; i < n; ++i) out[i] = i;
        return;
    }
    std::unordered_set<int> seen;
    while (static_cast<int>(out.size()) < k) {
        const int v = static_cast<int>(rng.index(n));
        if (seen.insert(v).second) out.push_back(v);
    }
}

}  // namespace

DayLog step_day(Population& pop, const SimConfig& config, int day, RngStream& rng) {
    if (day < 1 || day > config.horizon_days())
        throw std::invalid_argument("day outside configured horizon");
    const PhaseParams& ph = config.phase(day);
    DayLog log;
    log.day = day;

    // (1) movement: moves are persistent; offsets clamped at grid borders
    for (Person& p : pop.people) {
        if (p.state == HealthState::Dead) continue;
        if (ph.mobility_fraction > 0.0 && rng.bernoulli(ph.mobility_fraction)) {
            const int e = ph.movement_extent;
            p.row = static_cast<std::int16_t>(
                clamp_coord(p.row + rng.uniform_int(-e, e), pop.rows - 1));
            p.col = static_cast<std::int16_t>(
                clamp_coord(p.col + rng.uniform_int(-e, e), pop.cols - 1));
            ++log.movers;
        }
    }

    // occupancy of living persons after today's moves
    std::vector<std::vector<int>> occupants(
        static_cast<std::size_t>(pop.rows) * pop.cols);
    for (const Person& p : pop.people) {
        if (p.state != HealthState::Dead)
            occupants[pop.cell_index(p.row, p.col)].push_back(p.id);
    }

    // (2)+(3)+(5) meetings, contagion, contact log
    std::vector<int> picks;
    std::vector<int> sus;
    for (const auto& cell : occupants) {
        if (cell.empty()) continue;
        const int n_meetings = rng.poisson(ph.meetings_per_cell_rate);
        for (int m = 0; m < n_meetings; ++m) {
            const int want = rng.poisson(ph.movers_rate) + 1;
            draw_distinct(static_cast<int>(cell.size()), want, rng, picks);
            bool contagious = false;
            sus.clear();
            for (std::size_t i = 0; i < picks.size(); ++i) {
                const Person& pi = pop.people[cell[picks[i]]];
                if (is_contagious(pi.state)) contagious = true;
                if (pi.state == HealthState::Susceptible) sus.push_back(pi.id);
                for (std::size_t j = i + 1; j < picks.size(); ++j)
                    log.contacts.emplace_back(cell[picks[i]], cell[picks[j]]);
            }
            if (contagious && !sus.empty() && ph.infections_per_meeting > 0) {
                const int n_conv =
                    std::min<int>(ph.infections_per_meeting, static_cast<int>(sus.size()));
                std::vector<int> conv;
                draw_distinct(static_cast<int>(sus.size()), n_conv, rng, conv);
                for (int ci : conv) {
                    Person& q = pop.people[sus[ci]];
                    q.state = HealthState::Exposed;
                    q.state_entry_day = day;
                    ++log.new_exposed;
                }
            }
        }
    }

    // (4)+(6) timed transitions at end of day; new symptomatic cases verified
    for (Person& p : pop.people) {
        const int in_state = day - p.state_entry_day;
        switch (p.state) {
            case HealthState::Exposed:
                if (in_state >= config.incubation_days) {
                    if (rng.bernoulli(config.p_symptomatic)) {
                        p.state = HealthState::InfectedSymptomatic;
                        p.verified_day = day;
                        ++log.new_symptomatic;
                    } else {
                        p.state = HealthState::Asymptomatic;
                        ++log.new_asymptomatic;
                    }
                    p.state_entry_day = day;
                }
                break;
            case HealthState::Asymptomatic:
                if (in_state >= config.asymptomatic_infectious_days) {
                    p.state = HealthState::Recovered;
                    p.state_entry_day = day;
                    ++log.new_recovered;
                }
                break;
            case HealthState::InfectedSymptomatic:
                if (in_state >= config.symptomatic_infectious_days) {
                    if (rng.bernoulli(config.p_recover_symptomatic)) {
                        p.state = HealthState::Recovered;
                        ++log.new_recovered;
                    } else {
                        p.state = HealthState::Dead;
                        ++log.new_dead;
                    }
                    p.state_entry_day = day;
                }
                break;
            default:
                break;
        }
    }
    return log;
}

StateCounts EpidemicTrace::counts(int day) const {
    StateCounts c{};
    for (std::uint8_t s : states[day - 1]) ++c[s];
    return c;
}

EpidemicTrace run_epidemic(const SimConfig& config) {
    config.validate();
    RngStream rng(config.rng_seed);
    Population pop = generate_population(config, rng);

    EpidemicTrace trace;
    trace.n_persons = pop.size();
    trace.days = config.horizon_days();
    trace.rows = pop.rows;
    trace.cols = pop.cols;
    trace.states.reserve(trace.days);
    trace.cells.reserve(trace.days);

    for (int day = 1; day <= trace.days; ++day) {
        DayLog log = step_day(pop, config, day, rng);
        for (const auto& [a, b] : log.contacts)
            trace.contacts.push_back({day, a, b});
        std::vector<std::uint8_t> st(pop.size());
        std::vector<std::uint16_t> cl(pop.size());
        for (const Person& p : pop.people) {
            st[p.id] = static_cast<std::uint8_t>(p.state);
            cl[p.id] = static_cast<std::uint16_t>(pop.cell_index(p.row, p.col));
        }
        trace.states.push_back(std::move(st));
        trace.cells.push_back(std::move(cl));
    }
    trace.verified_day.resize(pop.size());
    for (const Person& p : pop.people) trace.verified_day[p.id] = p.verified_day;
    return trace;
}

void save_trace(const EpidemicTrace& trace, const std::string& states_path,
                const std::string& contacts_path) {
    std::ofstream sf(states_path);
    if (!sf) throw std::runtime_error("cannot write " + states_path);
    sf << "day,person_id,state,cell_row,cell_col\n";
    for (int day = 1; day <= trace.days; ++day) {
        for (int p = 0; p < trace.n_persons; ++p) {
            sf << day << ',' << p << ','
               << state_code(trace.state_of(p, day)) << ','
               << trace.cell_row_of(p, day) << ',' << trace.cell_col_of(p, day)
               << '\n';
        }
    }
    std::ofstream cf(contacts_path);
    if (!cf) throw std::runtime_error("cannot write " + contacts_path);
    cf << "day,person_a,person_b\n";
    for (const ContactRecord& r : trace.contacts)
        cf << r.day << ',' << r.a << ',' << r.b << '\n';
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

EpidemicTrace load_trace(const std::string& states_path,
                         const std::string& contacts_path) {
    std::ifstream sf(states_path);
    if (!sf) throw std::runtime_error("cannot read " + states_path);
    std::string line;
    if (!std::getline(sf, line) || line != "day,person_id,state,cell_row,cell_col")
        throw std::runtime_error("bad states header in " + states_path);

    EpidemicTrace trace;
    int max_day = 0, max_person = -1, max_cell_row = 0, max_cell_col = 0;
    struct Row {
        int day, person, row, col;
        char code;
    };
    std::vector<Row> rows;
    while (std::getline(sf, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 5) throw std::runtime_error("bad states row: " + line);
        Row r{std::stoi(f[0]), std::stoi(f[1]), std::stoi(f[3]), std::stoi(f[4]),
              f[2].at(0)};
        max_day = std::max(max_day, r.day);
        max_person = std::max(max_person, r.person);
        max_cell_row = std::max(max_cell_row, r.row);
        max_cell_col = std::max(max_cell_col, r.col);
        rows.push_back(r);
    }
    trace.days = max_day;
    trace.n_persons = max_person + 1;
    trace.rows = max_cell_row + 1;
    trace.cols = max_cell_col + 1;
    trace.states.assign(trace.days, std::vector<std::uint8_t>(trace.n_persons));
    trace.cells.assign(trace.days, std::vector<std::uint16_t>(trace.n_persons));
    for (const Row& r : rows) {
        trace.states[r.day - 1][r.person] =
            static_cast<std::uint8_t>(state_from_code(r.code));
        trace.cells[r.day - 1][r.person] =
            static_cast<std::uint16_t>(r.row * trace.cols + r.col);
    }

    std::ifstream cf(contacts_path);
    if (!cf) throw std::runtime_error("cannot read " + contacts_path);
    if (!std::getline(cf, line) || line != "day,person_a,person_b")
        throw std::runtime_error("bad contacts header in " + contacts_path);
    while (std::getline(cf, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 3) throw std::runtime_error("bad contacts row: " + line);
        trace.contacts.push_back({std::stoi(f[0]), std::stoi(f[1]), std::stoi(f[2])});
    }

    // verification day is derivable: first day observed symptomatic
    trace.verified_day.assign(trace.n_persons, -1);
    for (int day = 1; day <= trace.days; ++day) {
        for (int p = 0; p < trace.n_persons; ++p) {
            if (trace.verified_day[p] < 0 &&
                trace.state_of(p, day) == HealthState::InfectedSymptomatic)
                trace.verified_day[p] = day;
        }
    }
    return trace;
}

}  // namespace episample
