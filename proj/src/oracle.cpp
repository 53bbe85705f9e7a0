#include "fjsp/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fjsp {

std::pair<std::vector<std::uint8_t>, double> exact_bqm_minimum(const Bqm& bqm) {
    const int n = bqm.num_vars;
    if (n > 26) {
        throw std::invalid_argument("exact_bqm_minimum: " + std::to_string(n) + " variables exceeds the 26-variable guard");
    }
    std::vector<std::uint8_t> state(static_cast<std::size_t>(n), 0);
    std::vector<std::uint8_t> best_state = state;
    double best_energy = bqm.offset;  // all-zeros

    if (n == 0) return {best_state, best_energy};

    // Adjacency for incremental single-flip deltas.
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
    for (const auto& [key, value] : bqm.quadratic) {
        adj[static_cast<std::size_t>(key.first)].push_back({key.second, value});
        adj[static_cast<std::size_t>(key.second)].push_back({key.first, value});
    }

    double e = best_energy;
    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t g = 1; g < total; ++g) {
        const int flip = std::countr_zero(g);  // Gray-code visit order
        double field = bqm.linear[static_cast<std::size_t>(flip)];
        for (const auto& [other, coeff] : adj[static_cast<std::size_t>(flip)]) {
            if (state[static_cast<std::size_t>(other)]) field += coeff;
        }
        const auto idx = static_cast<std::size_t>(flip);
        e += state[idx] ? -field : field;
        state[idx] ^= 1;

        if (e <= best_energy + 1e-9) {
            // Re-evaluate exactly so accumulated drift cannot decide ties.
            const double exact = energy(bqm, state);
            if (exact < best_energy ||
                (exact == best_energy && std::lexicographical_compare(state.begin(), state.end(), best_state.begin(), best_state.end()))) {
                best_energy = exact;
                best_state = state;
            }
        }
    }
    return {best_state, best_energy};
}

namespace {

struct BranchState {
    const FjsspInstance& instance;
    int horizon_cap;
    long long budget;
    long long nodes = 0;

    std::vector<int> next_op;      // per job
    std::vector<int> ready;        // per job: finish of last scheduled op
    std::vector<int> remaining;    // per job: sum of min times of remaining ops
    std::vector<std::vector<std::pair<int, int>>> busy;  // per machine: (start, finish)
    int best = -1;                 // incumbent makespan, -1 = none
    int current_max_finish = 0;

    explicit BranchState(const FjsspInstance& inst, int cap, long long b) : instance(inst), horizon_cap(cap), budget(b) {
        const auto jobs = instance.jobs.size();
        next_op.assign(jobs, 0);
        ready.assign(jobs, 0);
        remaining.assign(jobs, 0);
        busy.resize(static_cast<std::size_t>(instance.machine_count));
        for (std::size_t i = 0; i < jobs; ++i) {
            for (const auto& op : instance.jobs[i].operations) remaining[i] += op.min_time();
        }
    }

    bool machine_free(int machine, int start, int finish) const {
        for (const auto& [s, f] : busy[static_cast<std::size_t>(machine)]) {
            if (start < f && s < finish) return false;
        }
        return true;
    }

    int lower_bound() const {
        int lb = current_max_finish;
        for (std::size_t i = 0; i < instance.jobs.size(); ++i) {
            lb = std::max(lb, ready[i] + remaining[i]);
        }
        return lb;
    }

    void search() {
        if (++nodes > budget) throw OracleBudgetExceeded("optimal_makespan: node budget exhausted");

        // Pick the pending operation with the smallest ready time (ties by
        // job id): earliest-start order.
        int job = -1;
        for (std::size_t i = 0; i < instance.jobs.size(); ++i) {
            if (next_op[i] >= static_cast<int>(instance.jobs[i].operations.size())) continue;
            if (job < 0 || ready[i] < ready[static_cast<std::size_t>(job)]) job = static_cast<int>(i);
        }
        if (job < 0) {  // complete schedule
            if (best < 0 || current_max_finish < best) best = current_max_finish;
            return;
        }
        if (best >= 0 && lower_bound() >= best) return;

        const auto j = static_cast<std::size_t>(job);
        const Operation& op = instance.jobs[j].operations[static_cast<std::size_t>(next_op[j])];
        for (const auto& opt : op.eligible) {
            const int latest = (best >= 0 ? std::min(horizon_cap, best) : horizon_cap) - opt.time;
            for (int start = ready[j]; start <= latest; ++start) {
                const int finish = start + opt.time;
                if (!machine_free(opt.machine, start, finish)) continue;

                const int saved_ready = ready[j];
                const int saved_max = current_max_finish;
                busy[static_cast<std::size_t>(opt.machine)].push_back({start, finish});
                next_op[j] += 1;
                ready[j] = finish;
                remaining[j] -= op.min_time();
                current_max_finish = std::max(current_max_finish, finish);

                search();

                current_max_finish = saved_max;
                remaining[j] += op.min_time();
                ready[j] = saved_ready;
                next_op[j] -= 1;
                busy[static_cast<std::size_t>(opt.machine)].pop_back();
            }
        }
    }
};

// Greedy earliest-finish schedule, used as the initial incumbent bound.
std::optional<int> greedy_makespan(const FjsspInstance& instance, int horizon_cap) {
    std::vector<std::vector<std::pair<int, int>>> busy(static_cast<std::size_t>(instance.machine_count));
    auto free_at = [&busy](int machine, int start, int finish) {
        for (const auto& [s, f] : busy[static_cast<std::size_t>(machine)]) {
            if (start < f && s < finish) return false;
        }
        return true;
    };
    int makespan = 0;
    for (const auto& job : instance.jobs) {
        int ready = 0;
        for (const auto& op : job.operations) {
            int best_finish = -1, best_machine = -1, best_start = -1;
            for (const auto& opt : op.eligible) {
                for (int start = ready; start + opt.time <= horizon_cap; ++start) {
                    if (!free_at(opt.machine, start, start + opt.time)) continue;
                    if (best_finish < 0 || start + opt.time < best_finish) {
                        best_finish = start + opt.time;
                        best_machine = opt.machine;
                        best_start = start;
                    }
                    break;  // earliest start for this machine
                }
            }
            if (best_finish < 0) return std::nullopt;
            busy[static_cast<std::size_t>(best_machine)].push_back({best_start, best_finish});
            ready = best_finish;
            makespan = std::max(makespan, best_finish);
        }
    }
    return makespan;
}

}  // namespace

std::optional<int> optimal_makespan(const FjsspInstance& instance, int horizon_cap, long long node_budget) {
    if (horizon_cap < 1) return std::nullopt;
    BranchState state(instance, horizon_cap, node_budget);
    if (auto greedy = greedy_makespan(instance, horizon_cap)) state.best = *greedy;
    state.search();
    if (state.best < 0) return std::nullopt;
    return state.best;
}

std::vector<Diagnostic> verify_schedule(const FjsspInstance& instance, const Schedule& schedule) {
    std::vector<Diagnostic> diags;

    // Coverage: exactly one entry per instance operation.
    std::vector<std::vector<int>> seen(instance.jobs.size());
    for (std::size_t i = 0; i < instance.jobs.size(); ++i) {
        seen[i].assign(instance.jobs[i].operations.size(), 0);
    }
    for (const auto& op : schedule.ops) {
        if (op.job < 0 || op.job >= static_cast<int>(instance.jobs.size()) || op.op < 0 ||
            op.op >= static_cast<int>(instance.jobs[static_cast<std::size_t>(op.job)].operations.size())) {
            diags.push_back({ConstraintKind::OneStart,
                             "schedule entry references unknown operation (job " + std::to_string(op.job) + ", op " +
                                 std::to_string(op.op) + ")"});
            continue;
        }
        seen[static_cast<std::size_t>(op.job)][static_cast<std::size_t>(op.op)] += 1;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        for (std::size_t j = 0; j < seen[i].size(); ++j) {
            if (seen[i][j] != 1) {
                diags.push_back({ConstraintKind::OneStart, "operation (job " + std::to_string(i) + ", op " +
                                                               std::to_string(j) + ") scheduled " +
                                                               std::to_string(seen[i][j]) + " times"});
            }
        }
    }

    // Per-entry validity: eligible machine, consistent finish, start >= 0.
    for (const auto& op : schedule.ops) {
        if (op.job < 0 || op.job >= static_cast<int>(instance.jobs.size())) continue;
        const auto& ops = instance.jobs[static_cast<std::size_t>(op.job)].operations;
        if (op.op < 0 || op.op >= static_cast<int>(ops.size())) continue;
        const std::string where = "(job " + std::to_string(op.job) + ", op " + std::to_string(op.op) + ")";
        if (op.start < 0) {
            diags.push_back({ConstraintKind::Window, where + " starts at negative time " + std::to_string(op.start)});
        }
        const auto& eligible = ops[static_cast<std::size_t>(op.op)].eligible;
        const auto it = std::find_if(eligible.begin(), eligible.end(),
                                     [&op](const MachineOption& o) { return o.machine == op.machine; });
        if (it == eligible.end()) {
            diags.push_back({ConstraintKind::OneStart, where + " runs on ineligible machine " + std::to_string(op.machine)});
        } else if (op.finish != op.start + it->time) {
            diags.push_back({ConstraintKind::OneStart, where + " finish " + std::to_string(op.finish) +
                                                           " != start + processing time " +
                                                           std::to_string(op.start + it->time)});
        }
    }

    // Operation order within each job.
    for (const auto& a : schedule.ops) {
        for (const auto& b : schedule.ops) {
            if (a.job == b.job && b.op == a.op + 1 && b.start < a.finish) {
                diags.push_back({ConstraintKind::Precedence,
                                 "job " + std::to_string(a.job) + ": op " + std::to_string(b.op) + " starts at " +
                                     std::to_string(b.start) + " before op " + std::to_string(a.op) + " finishes at " +
                                     std::to_string(a.finish)});
            }
        }
    }

    // Machine exclusivity.
    for (std::size_t x = 0; x < schedule.ops.size(); ++x) {
        for (std::size_t y = x + 1; y < schedule.ops.size(); ++y) {
            const auto& a = schedule.ops[x];
            const auto& b = schedule.ops[y];
            if (a.machine != b.machine) continue;
            if (a.start < b.finish && b.start < a.finish) {
                diags.push_back({ConstraintKind::Overlap,
                                 "machine " + std::to_string(a.machine) + ": (job " + std::to_string(a.job) + ", op " +
                                     std::to_string(a.op) + ") overlaps (job " + std::to_string(b.job) + ", op " +
                                     std::to_string(b.op) + ")"});
            }
        }
    }
    return diags;
}

}  // namespace fjsp
