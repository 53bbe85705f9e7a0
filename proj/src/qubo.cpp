#include "fjsp/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fjsp {

const char* constraint_kind_name(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::OneStart: return "one-start";
        case ConstraintKind::Precedence: return "precedence";
        case ConstraintKind::Overlap: return "overlap";
        case ConstraintKind::Window: return "window";
    }
    return "?";
}

std::string format_diagnostics(const std::vector<Diagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
        out += constraint_kind_name(d.kind);
        out += ": ";
        out += d.detail;
        out += '\n';
    }
    return out;
}

int VariableTable::index_of(const VarKey& key) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key);
    if (it == entries_.end() || !(*it == key)) return -1;
    return static_cast<int>(it - entries_.begin());
}

const VariableTable::OpSlice* VariableTable::find_op(int job, int op) const {
    for (const auto& slice : ops_) {
        if (slice.job == job && slice.op == op) return &slice;
    }
    return nullptr;
}

namespace {

// keyed: (key, est). Sorted lexicographically, then cut into per-op slices.
void sort_and_slice(std::vector<std::pair<VarKey, int>>& keyed, std::vector<VarKey>& entries,
                    std::vector<VariableTable::OpSlice>& ops) {
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    entries.clear();
    ops.clear();
    entries.reserve(keyed.size());
    for (const auto& [key, est] : keyed) {
        if (ops.empty() || ops.back().job != key.job || ops.back().op != key.op) {
            ops.push_back({key.job, key.op, static_cast<int>(entries.size()), 0, est});
        }
        ops.back().count += 1;
        entries.push_back(key);
    }
}

}  // namespace

VariableTable VariableTable::build(const FjsspInstance& instance, int t_window) {
    if (t_window < 1) throw std::invalid_argument("build_variable_table: t_window must be >= 1");
    std::vector<std::pair<VarKey, int>> keyed;
    for (std::size_t i = 0; i < instance.jobs.size(); ++i) {
        const Job& job = instance.jobs[i];
        for (std::size_t j = 0; j < job.operations.size(); ++j) {
            const int est = earliest_start(instance, static_cast<int>(i), static_cast<int>(j));
            bool any = false;
            for (const auto& opt : job.operations[j].eligible) {
                const int last_start = instance.horizon - opt.time;
                for (int t = est; t < est + t_window; ++t) {
                    if (t < 0 || t > last_start) continue;
                    keyed.push_back({VarKey{static_cast<int>(i), static_cast<int>(j), opt.machine, t}, est});
                    any = true;
                }
            }
            if (!any) {
                throw std::runtime_error("variable table: operation (job " + std::to_string(i) + ", op " +
                                         std::to_string(j) + ") has an empty start-time window");
            }
        }
    }
    VariableTable table;
    sort_and_slice(keyed, table.entries_, table.ops_);
    return table;
}

VariableTable VariableTable::build_explicit(const FjsspInstance& instance, const std::vector<OpWindows>& windows) {
    std::vector<std::pair<VarKey, int>> keyed;
    for (const auto& w : windows) {
        const int est = earliest_start(instance, w.job, w.op);
        bool any = false;
        for (const auto& [machine, starts] : w.starts_per_machine) {
            for (int t : starts) {
                keyed.push_back({VarKey{w.job, w.op, machine, t}, est});
                any = true;
            }
        }
        if (!any) {
            throw std::runtime_error("variable table: operation (job " + std::to_string(w.job) + ", op " +
                                     std::to_string(w.op) + ") has an empty start-time window");
        }
    }
    VariableTable table;
    sort_and_slice(keyed, table.entries_, table.ops_);
    return table;
}

VariableTable build_variable_table(const FjsspInstance& instance, int t_window) {
    return VariableTable::build(instance, t_window);
}

PenaltyWeights PenaltyWeights::defaults(const FjsspInstance& instance, int t_window) {
    PenaltyWeights w;
    const int n_ops = std::max(1, instance.total_operations());
    w.delta = 1.0 / (2.0 * n_ops * std::max(t_window - 1, 1));
    return w;
}

Bqm Bqm::empty(int num_vars) {
    Bqm bqm;
    bqm.num_vars = num_vars;
    bqm.linear.assign(static_cast<std::size_t>(num_vars), 0.0);
    return bqm;
}

void Bqm::add_quadratic(int a, int b, double value) {
    if (a == b) {  // x^2 = x for binary variables
        add_linear(a, value);
        return;
    }
    if (a > b) std::swap(a, b);
    quadratic[{a, b}] += value;
}

void Bqm::prune_zeros() {
    for (auto it = quadratic.begin(); it != quadratic.end();) {
        if (it->second == 0.0) {
            it = quadratic.erase(it);
        } else {
            ++it;
        }
    }
}

namespace {

int processing_time(const FjsspInstance& instance, const VarKey& key) {
    const auto& op = instance.jobs[static_cast<std::size_t>(key.job)].operations[static_cast<std::size_t>(key.op)];
    for (const auto& opt : op.eligible) {
        if (opt.machine == key.machine) return opt.time;
    }
    throw std::logic_error("variable references a machine that is not eligible");
}

bool intervals_intersect(int s1, int p1, int s2, int p2) { return s1 < s2 + p2 && s2 < s1 + p1; }

}  // namespace

Bqm build_bqm(const FjsspInstance& instance, const VariableTable& table, const PenaltyWeights& weights) {
    Bqm bqm = Bqm::empty(table.num_vars());
    const auto& entries = table.entries();
    const auto& ops = table.ops();

    // One start per operation: (sum_v x_v - 1)^2 expands to -x_v per
    // variable, +2 per same-operation pair and +1 offset.
    for (const auto& slice : ops) {
        for (int a = slice.first; a < slice.first + slice.count; ++a) {
            bqm.add_linear(a, -weights.alpha);
            for (int b = a + 1; b < slice.first + slice.count; ++b) {
                bqm.add_quadratic(a, b, 2.0 * weights.alpha);
            }
        }
        bqm.offset += weights.alpha;
    }

    // Operation order: successor must not start before the predecessor
    // finishes.
    for (const auto& slice : ops) {
        const auto* next = table.find_op(slice.job, slice.op + 1);
        if (next == nullptr) continue;
        for (int a = slice.first; a < slice.first + slice.count; ++a) {
            const int finish = entries[static_cast<std::size_t>(a)].start + processing_time(instance, entries[static_cast<std::size_t>(a)]);
            for (int b = next->first; b < next->first + next->count; ++b) {
                if (entries[static_cast<std::size_t>(b)].start < finish) {
                    bqm.add_quadratic(a, b, weights.beta);
                }
            }
        }
    }

    // Machine exclusivity: one penalty per unordered pair of variables of
    // distinct operations whose execution intervals intersect on a shared
    // machine. Same-operation pairs are already covered by the one-start
    // term.
    std::map<int, std::vector<int>> by_machine;
    for (int v = 0; v < table.num_vars(); ++v) {
        by_machine[entries[static_cast<std::size_t>(v)].machine].push_back(v);
    }
    for (const auto& [machine, vars] : by_machine) {
        for (std::size_t x = 0; x < vars.size(); ++x) {
            const VarKey& a = entries[static_cast<std::size_t>(vars[x])];
            const int pa = processing_time(instance, a);
            for (std::size_t y = x + 1; y < vars.size(); ++y) {
                const VarKey& b = entries[static_cast<std::size_t>(vars[y])];
                if (a.job == b.job && a.op == b.op) continue;
                if (intervals_intersect(a.start, pa, b.start, processing_time(instance, b))) {
                    bqm.add_quadratic(vars[x], vars[y], weights.gamma);
                }
            }
        }
    }

    // Start-delay objective: penalize starting later than the earliest
    // possible time.
    for (const auto& slice : ops) {
        for (int a = slice.first; a < slice.first + slice.count; ++a) {
            bqm.add_linear(a, weights.delta * (entries[static_cast<std::size_t>(a)].start - slice.est));
        }
    }

    bqm.prune_zeros();
    return bqm;
}

std::pair<int, int> count_interactions(const Bqm& bqm) {
    std::vector<char> touched(static_cast<std::size_t>(bqm.num_vars), 0);
    for (int i = 0; i < bqm.num_vars; ++i) {
        if (bqm.linear[static_cast<std::size_t>(i)] != 0.0) touched[static_cast<std::size_t>(i)] = 1;
    }
    int n_q = 0;
    for (const auto& [key, value] : bqm.quadratic) {
        if (value == 0.0) continue;
        ++n_q;
        touched[static_cast<std::size_t>(key.first)] = 1;
        touched[static_cast<std::size_t>(key.second)] = 1;
    }
    int n_v = 0;
    for (char t : touched) n_v += t;
    return {n_v, n_q};
}

double energy(const Bqm& bqm, std::span<const std::uint8_t> sample) {
    if (static_cast<int>(sample.size()) != bqm.num_vars) {
        throw std::invalid_argument("energy: sample length " + std::to_string(sample.size()) + " != num_vars " +
                                    std::to_string(bqm.num_vars));
    }
    double e = bqm.offset;
    for (int i = 0; i < bqm.num_vars; ++i) {
        if (sample[static_cast<std::size_t>(i)]) e += bqm.linear[static_cast<std::size_t>(i)];
    }
    for (const auto& [key, value] : bqm.quadratic) {
        if (sample[static_cast<std::size_t>(key.first)] && sample[static_cast<std::size_t>(key.second)]) e += value;
    }
    return e;
}

EnergyBreakdown energy_terms(const FjsspInstance& instance, const VariableTable& table, const PenaltyWeights& weights,
                             std::span<const std::uint8_t> sample) {
    if (static_cast<int>(sample.size()) != table.num_vars()) {
        throw std::invalid_argument("energy_terms: sample length mismatch");
    }
    EnergyBreakdown out;
    const auto& entries = table.entries();

    for (const auto& slice : table.ops()) {
        int set_count = 0;
        for (int a = slice.first; a < slice.first + slice.count; ++a) {
            if (!sample[static_cast<std::size_t>(a)]) continue;
            ++set_count;
            out.delay += weights.delta * (entries[static_cast<std::size_t>(a)].start - slice.est);
        }
        const double d = set_count - 1.0;
        out.onestart += weights.alpha * d * d;

        const auto* next = table.find_op(slice.job, slice.op + 1);
        if (next != nullptr) {
            for (int a = slice.first; a < slice.first + slice.count; ++a) {
                if (!sample[static_cast<std::size_t>(a)]) continue;
                const int finish =
                    entries[static_cast<std::size_t>(a)].start + processing_time(instance, entries[static_cast<std::size_t>(a)]);
                for (int b = next->first; b < next->first + next->count; ++b) {
                    if (sample[static_cast<std::size_t>(b)] && entries[static_cast<std::size_t>(b)].start < finish) {
                        out.precedence += weights.beta;
                    }
                }
            }
        }
    }

    for (int a = 0; a < table.num_vars(); ++a) {
        if (!sample[static_cast<std::size_t>(a)]) continue;
        const VarKey& ka = entries[static_cast<std::size_t>(a)];
        const int pa = processing_time(instance, ka);
        for (int b = a + 1; b < table.num_vars(); ++b) {
            if (!sample[static_cast<std::size_t>(b)]) continue;
            const VarKey& kb = entries[static_cast<std::size_t>(b)];
            if (ka.machine != kb.machine) continue;
            if (ka.job == kb.job && ka.op == kb.op) continue;
            if (intervals_intersect(ka.start, pa, kb.start, processing_time(instance, kb))) {
                out.overlap += weights.gamma;
            }
        }
    }
    return out;
}

DecodeResult decode(const FjsspInstance& instance, const VariableTable& table, std::span<const std::uint8_t> sample) {
    if (static_cast<int>(sample.size()) != table.num_vars()) {
        throw std::invalid_argument("decode: sample length mismatch");
    }
    DecodeResult result;
    const auto& entries = table.entries();
    std::vector<ScheduledOp> decoded;

    for (const auto& slice : table.ops()) {
        std::vector<int> set_vars;
        for (int a = slice.first; a < slice.first + slice.count; ++a) {
            if (sample[static_cast<std::size_t>(a)]) set_vars.push_back(a);
        }
        if (set_vars.size() != 1) {
            std::string detail = "operation (job " + std::to_string(slice.job) + ", op " + std::to_string(slice.op) +
                                 ") has " + std::to_string(set_vars.size()) + " set start variables";
            for (int v : set_vars) {
                const VarKey& k = entries[static_cast<std::size_t>(v)];
                detail += " [var " + std::to_string(v) + ": m" + std::to_string(k.machine) + " t" + std::to_string(k.start) + "]";
            }
            result.violations.push_back({ConstraintKind::OneStart, std::move(detail)});
            continue;
        }
        const VarKey& k = entries[static_cast<std::size_t>(set_vars[0])];
        decoded.push_back({k.job, k.op, k.machine, k.start, k.start + processing_time(instance, k)});
    }

    // Precedence between consecutive operations that both decoded. `decoded`
    // follows table order, so a successor can only be the next element of the
    // same job.
    for (std::size_t x = 0; x + 1 < decoded.size(); ++x) {
        const auto& a = decoded[x];
        const auto& b = decoded[x + 1];
        if (a.job == b.job && b.op == a.op + 1 && b.start < a.finish) {
            result.violations.push_back(
                {ConstraintKind::Precedence, "job " + std::to_string(a.job) + ": op " + std::to_string(b.op) +
                                                 " starts at " + std::to_string(b.start) + " before op " +
                                                 std::to_string(a.op) + " finishes at " + std::to_string(a.finish)});
        }
    }

    // Machine exclusivity among decoded operations.
    for (std::size_t x = 0; x < decoded.size(); ++x) {
        for (std::size_t y = x + 1; y < decoded.size(); ++y) {
            const auto& a = decoded[x];
            const auto& b = decoded[y];
            if (a.machine != b.machine) continue;
            if (intervals_intersect(a.start, a.finish - a.start, b.start, b.finish - b.start)) {
                result.violations.push_back(
                    {ConstraintKind::Overlap, "machine " + std::to_string(a.machine) + ": (job " + std::to_string(a.job) +
                                                  ", op " + std::to_string(a.op) + ") and (job " + std::to_string(b.job) +
                                                  ", op " + std::to_string(b.op) + ") overlap at t=" +
                                                  std::to_string(std::max(a.start, b.start))});
            }
        }
    }

    if (result.violations.empty()) {
        Schedule schedule;
        schedule.ops = std::move(decoded);
        std::sort(schedule.ops.begin(), schedule.ops.end(),
                  [](const ScheduledOp& a, const ScheduledOp& b) { return std::tie(a.job, a.op) < std::tie(b.job, b.op); });
        for (const auto& op : schedule.ops) schedule.makespan = std::max(schedule.makespan, op.finish);
        result.schedule = std::move(schedule);
    }
    return result;
}

IsingModel to_ising(const Bqm& bqm) {
    IsingModel ising;
    ising.num_vars = bqm.num_vars;
    ising.h.assign(static_cast<std::size_t>(bqm.num_vars), 0.0);
    ising.offset = bqm.offset;
    for (int i = 0; i < bqm.num_vars; ++i) {
        const double a = bqm.linear[static_cast<std::size_t>(i)];
        ising.h[static_cast<std::size_t>(i)] += a / 2.0;
        ising.offset += a / 2.0;
    }
    for (const auto& [key, b] : bqm.quadratic) {
        ising.j[key] += b / 4.0;
        ising.h[static_cast<std::size_t>(key.first)] += b / 4.0;
        ising.h[static_cast<std::size_t>(key.second)] += b / 4.0;
        ising.offset += b / 4.0;
    }
    for (auto it = ising.j.begin(); it != ising.j.end();) {
        it = (it->second == 0.0) ? ising.j.erase(it) : std::next(it);
    }
    return ising;
}

Bqm from_ising(const IsingModel& ising) {
    Bqm bqm = Bqm::empty(ising.num_vars);
    bqm.offset = ising.offset;
    for (int i = 0; i < ising.num_vars; ++i) {
        const double h = ising.h[static_cast<std::size_t>(i)];
        bqm.add_linear(i, 2.0 * h);
        bqm.offset -= h;
    }
    for (const auto& [key, j] : ising.j) {
        bqm.add_quadratic(key.first, key.second, 4.0 * j);
        bqm.add_linear(key.first, -2.0 * j);
        bqm.add_linear(key.second, -2.0 * j);
        bqm.offset += j;
    }
    bqm.prune_zeros();
    return bqm;
}

double ising_energy(const IsingModel& ising, std::span<const std::int8_t> spins) {
    if (static_cast<int>(spins.size()) != ising.num_vars) {
        throw std::invalid_argument("ising_energy: spin vector length mismatch");
    }
    double e = ising.offset;
    for (int i = 0; i < ising.num_vars; ++i) e += ising.h[static_cast<std::size_t>(i)] * spins[static_cast<std::size_t>(i)];
    for (const auto& [key, j] : ising.j) {
        e += j * spins[static_cast<std::size_t>(key.first)] * spins[static_cast<std::size_t>(key.second)];
    }
    return e;
}

LogicalGraph interaction_graph(const Bqm& bqm) {
    LogicalGraph graph;
    graph.num_vars = bqm.num_vars;
    graph.edges.reserve(bqm.quadratic.size());
    for (const auto& [key, value] : bqm.quadratic) {
        if (value != 0.0) graph.edges.push_back(key);
    }
    return graph;
}

namespace {

std::string fmt_coeff(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace

void write_bqm(std::ostream& out, const Bqm& bqm) {
    out << "nvars " << bqm.num_vars << '\n';
    for (int i = 0; i < bqm.num_vars; ++i) {
        const double c = bqm.linear[static_cast<std::size_t>(i)];
        if (c != 0.0) out << "lin " << i << ' ' << fmt_coeff(c) << '\n';
    }
    for (const auto& [key, value] : bqm.quadratic) {
        out << "quad " << key.first << ' ' << key.second << ' ' << fmt_coeff(value) << '\n';
    }
    out << "offset " << fmt_coeff(bqm.offset) << '\n';
}

Bqm read_bqm(std::istream& in) {
    std::string line;
    int line_no = 0;
    Bqm bqm;
    bool have_nvars = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        auto fail = [&](const std::string& why) {
            throw std::runtime_error("bqm text line " + std::to_string(line_no) + ": " + why);
        };
        if (tag == "nvars") {
            int n = -1;
            if (!(ss >> n) || n < 0) fail("expected 'nvars <n>'");
            bqm = Bqm::empty(n);
            have_nvars = true;
        } else if (tag == "lin") {
            int i = 0;
            double c = 0;
            if (!have_nvars) fail("'lin' before 'nvars'");
            if (!(ss >> i >> c) || i < 0 || i >= bqm.num_vars) fail("expected 'lin <idx> <coeff>'");
            bqm.add_linear(i, c);
        } else if (tag == "quad") {
            int a = 0, b = 0;
            double c = 0;
            if (!have_nvars) fail("'quad' before 'nvars'");
            if (!(ss >> a >> b >> c) || a < 0 || b < 0 || a >= bqm.num_vars || b >= bqm.num_vars || a == b) {
                fail("expected 'quad <a> <b> <coeff>' with distinct in-range indices");
            }
            bqm.add_quadratic(a, b, c);
        } else if (tag == "offset") {
            double c = 0;
            if (!(ss >> c)) fail("expected 'offset <coeff>'");
            bqm.offset += c;
        } else {
            fail("unknown directive '" + tag + "'");
        }
    }
    if (!have_nvars) throw std::runtime_error("bqm text: missing 'nvars' header");
    bqm.prune_zeros();
    return bqm;
}

}  // namespace fjsp
