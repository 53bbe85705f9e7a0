#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fjsp/diagnostics.hpp"
#include "fjsp/instance.hpp"

namespace fjsp {

// Identity of one binary variable: operation (job, op) starting at `start`
// on `machine`.
struct VarKey {
    int job = 0;
    int op = 0;
    int machine = 0;
    int start = 0;
    auto operator<=>(const VarKey&) const = default;
};

// Start times admitted for every (job, op, machine) triple, as an explicit
// list. Used to build tables with occupancy-adjusted windows.
struct OpWindows {
    int job = 0;
    int op = 0;
    // (machine, admissible start times ascending); must follow the
    // operation's eligible order.
    std::vector<std::pair<int, std::vector<int>>> starts_per_machine;
};

// Bijection between variable keys and dense indices 0..num_vars()-1.
// Entries are sorted lexicographically by (job, op, machine, start), so two
// builds of the same instance produce identical tables. May cover only a
// subset of the instance's operations (sub-problem tables).
class VariableTable {
public:
    struct OpSlice {
        int job = 0;
        int op = 0;
        int first = 0;  // index of the first entry of this operation
        int count = 0;
        int est = 0;  // earliest start from in-job predecessors
    };

    const std::vector<VarKey>& entries() const { return entries_; }
    const std::vector<OpSlice>& ops() const { return ops_; }
    int num_vars() const { return static_cast<int>(entries_.size()); }
    const VarKey& key(int index) const { return entries_[static_cast<std::size_t>(index)]; }

    // -1 when the key is not present.
    int index_of(const VarKey& key) const;
    const OpSlice* find_op(int job, int op) const;

    static VariableTable build(const FjsspInstance& instance, int t_window);
    static VariableTable build_explicit(const FjsspInstance& instance, const std::vector<OpWindows>& windows);

private:
    std::vector<VarKey> entries_;
    std::vector<OpSlice> ops_;
};

// Builds the table with per-operation windows {est .. est+t_window-1},
// clipped per machine to starts satisfying t + p <= horizon. Throws
// std::runtime_error naming the operation if a window clips to empty.
VariableTable build_variable_table(const FjsspInstance& instance, int t_window);

// Penalty weights of the three constraints and the start-delay objective.
struct PenaltyWeights {
    double alpha = 1.0;  // one start per operation
    double beta = 1.0;   // operation order within a job
    double gamma = 1.0;  // machine exclusivity
    double delta = 0.0;  // start-delay objective

    // alpha = beta = gamma = 1, delta = 1 / (2 * n_ops * max(t_window-1, 1)):
    // any single constraint violation outweighs the whole objective range.
    static PenaltyWeights defaults(const FjsspInstance& instance, int t_window);
};

// Binary quadratic model: offset + sum_i linear[i] x_i + sum_{a<b} quad x_a x_b.
struct Bqm {
    int num_vars = 0;
    std::vector<double> linear;
    std::map<std::pair<int, int>, double> quadratic;  // keys a < b, values nonzero
    double offset = 0.0;

    void add_linear(int i, double value) { linear[static_cast<std::size_t>(i)] += value; }
    void add_quadratic(int a, int b, double value);
    // Removes quadratic entries that cancelled to exactly zero.
    void prune_zeros();

    static Bqm empty(int num_vars);
};

// Compiles instance + table into the penalized model
//   alpha*H_onestart + beta*H_precedence + gamma*H_overlap + delta*H_delay.
Bqm build_bqm(const FjsspInstance& instance, const VariableTable& table, const PenaltyWeights& weights);

// (n_v, n_q): variables touched by at least one nonzero term, and nonzero
// quadratic entries.
std::pair<int, int> count_interactions(const Bqm& bqm);

// Throws std::invalid_argument on sample length mismatch.
double energy(const Bqm& bqm, std::span<const std::uint8_t> sample);

// The four penalty terms evaluated directly on the sample, bypassing the
// compiled coefficients. Serves as an independent check of build_bqm.
struct EnergyBreakdown {
    double onestart = 0.0;
    double precedence = 0.0;
    double overlap = 0.0;
    double delay = 0.0;
    double constraint_total() const { return onestart + precedence + overlap; }
    double total() const { return constraint_total() + delay; }
};
EnergyBreakdown energy_terms(const FjsspInstance& instance, const VariableTable& table, const PenaltyWeights& weights,
                             std::span<const std::uint8_t> sample);

struct ScheduledOp {
    int job = 0;
    int op = 0;
    int machine = 0;
    int start = 0;
    int finish = 0;
    bool operator==(const ScheduledOp&) const = default;
};

struct Schedule {
    std::vector<ScheduledOp> ops;  // sorted by (job, op)
    int makespan = 0;
    bool operator==(const Schedule&) const = default;
};

struct DecodeResult {
    std::optional<Schedule> schedule;
    std::vector<Diagnostic> violations;
    bool feasible() const { return schedule.has_value(); }
};

// Recovers the schedule encoded by a 0/1 sample. Feasible iff every covered
// operation has exactly one set variable, precedence holds and no machine
// runs two operations at once; otherwise reports every violated constraint.
DecodeResult decode(const FjsspInstance& instance, const VariableTable& table, std::span<const std::uint8_t> sample);

// Ising form over spins s_i in {-1, +1}, related by x = (1 + s) / 2. The
// offset absorbs the change of variables, so energies agree exactly.
struct IsingModel {
    int num_vars = 0;
    std::vector<double> h;
    std::map<std::pair<int, int>, double> j;  // keys a < b, values nonzero
    double offset = 0.0;
};

IsingModel to_ising(const Bqm& bqm);
Bqm from_ising(const IsingModel& ising);
double ising_energy(const IsingModel& ising, std::span<const std::int8_t> spins);

// Interaction graph of the nonzero quadratic terms (edges over variable
// indices). Declared here, consumed by the embedding machinery.
struct LogicalGraph {
    int num_vars = 0;
    std::vector<std::pair<int, int>> edges;  // u < v, sorted, unique
};
LogicalGraph interaction_graph(const Bqm& bqm);

// Text export, one term per line:
//   nvars <n> / lin <i> <c> / quad <a> <b> <c> / offset <c>
void write_bqm(std::ostream& out, const Bqm& bqm);
Bqm read_bqm(std::istream& in);

}  // namespace fjsp
