#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fjsp/qubo.hpp"

namespace fjsp {

// Independent ground truth for solver and model tests. Pure functions.

// Global minimum by exhaustive enumeration (Gray-code incremental updates).
// Ties resolve to the lexicographically smallest sample. Guarded: throws
// std::invalid_argument when bqm.num_vars > 26.
std::pair<std::vector<std::uint8_t>, double> exact_bqm_minimum(const Bqm& bqm);

// Thrown when the branch-and-bound node budget runs out; distinct from
// infeasibility (which is a nullopt result).
struct OracleBudgetExceeded : std::runtime_error {
    explicit OracleBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Minimum makespan over all schedules with integer starts in [0, horizon_cap),
// by branch and bound over (operation, machine, start) in earliest-start
// order. nullopt when no schedule fits the cap. Desk scale only.
std::optional<int> optimal_makespan(const FjsspInstance& instance, int horizon_cap,
                                    long long node_budget = 50'000'000);

// Empty iff the schedule assigns each operation one eligible machine with a
// consistent finish time, respects operation order and never runs two
// operations on one machine at once.
std::vector<Diagnostic> verify_schedule(const FjsspInstance& instance, const Schedule& schedule);

}  // namespace fjsp
