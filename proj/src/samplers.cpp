#include "fjsp/samplers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fjsp/rng.hpp"

namespace fjsp {

void SamplerParams::validate() const {
    if (num_reads < 1) throw std::invalid_argument("sampler: num_reads must be >= 1");
    if (sweeps < 1) throw std::invalid_argument("sampler: sweeps must be >= 1");
    if (sa && !(sa->beta_min < sa->beta_max)) throw std::invalid_argument("sampler: requires beta_min < beta_max");
    if (tabu && tabu->tenure < 1) throw std::invalid_argument("sampler: tabu tenure must be >= 1");
    if (tabu && tabu->restarts < 0) throw std::invalid_argument("sampler: tabu restarts must be >= 0");
    if (sqa) {
        if (sqa->trotter_slices < 2) throw std::invalid_argument("sampler: trotter_slices must be >= 2");
        if (sqa->gamma_final > sqa->gamma_initial) {
            throw std::invalid_argument("sampler: requires gamma_final <= gamma_initial");
        }
        if (sqa->temperature <= 0.0) throw std::invalid_argument("sampler: temperature must be > 0");
    }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Compressed adjacency over the quadratic terms.
struct Compiled {
    int n = 0;
    std::vector<double> linear;
    std::vector<int> row_start;
    std::vector<int> col;
    std::vector<double> coeff;

    explicit Compiled(const Bqm& bqm) : n(bqm.num_vars), linear(bqm.linear) {
        std::vector<int> degree(static_cast<std::size_t>(n), 0);
        for (const auto& [key, value] : bqm.quadratic) {
            (void)value;
            degree[static_cast<std::size_t>(key.first)] += 1;
            degree[static_cast<std::size_t>(key.second)] += 1;
        }
        row_start.assign(static_cast<std::size_t>(n) + 1, 0);
        for (int i = 0; i < n; ++i) row_start[static_cast<std::size_t>(i) + 1] = row_start[static_cast<std::size_t>(i)] + degree[static_cast<std::size_t>(i)];
        col.resize(static_cast<std::size_t>(row_start[static_cast<std::size_t>(n)]));
        coeff.resize(col.size());
        std::vector<int> fill(row_start.begin(), row_start.end() - 1);
        for (const auto& [key, value] : bqm.quadratic) {
            col[static_cast<std::size_t>(fill[static_cast<std::size_t>(key.first)])] = key.second;
            coeff[static_cast<std::size_t>(fill[static_cast<std::size_t>(key.first)]++)] = value;
            col[static_cast<std::size_t>(fill[static_cast<std::size_t>(key.second)])] = key.first;
            coeff[static_cast<std::size_t>(fill[static_cast<std::size_t>(key.second)]++)] = value;
        }
    }

    // field_i = linear_i + sum_j coeff_ij x_j; flip delta is (1-2x_i)*field_i.
    void init_fields(const std::vector<std::uint8_t>& x, std::vector<double>& field) const {
        field = linear;
        for (int i = 0; i < n; ++i) {
            if (!x[static_cast<std::size_t>(i)]) continue;
            for (int e = row_start[static_cast<std::size_t>(i)]; e < row_start[static_cast<std::size_t>(i) + 1]; ++e) {
                field[static_cast<std::size_t>(col[static_cast<std::size_t>(e)])] += coeff[static_cast<std::size_t>(e)];
            }
        }
    }

    void apply_flip(int i, std::vector<std::uint8_t>& x, std::vector<double>& field) const {
        const double sign = x[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
        x[static_cast<std::size_t>(i)] ^= 1;
        for (int e = row_start[static_cast<std::size_t>(i)]; e < row_start[static_cast<std::size_t>(i) + 1]; ++e) {
            field[static_cast<std::size_t>(col[static_cast<std::size_t>(e)])] += sign * coeff[static_cast<std::size_t>(e)];
        }
    }
};

void random_state(Rng& rng, std::vector<std::uint8_t>& x) {
    for (auto& bit : x) bit = rng.next_bit() ? 1 : 0;
}

// Auto-scaled inverse-temperature range: hot enough to accept the largest
// single-flip uphill move with probability 1/2, cold enough to reject the
// smallest one with probability 99/100.
SaSchedule auto_schedule(const Bqm& bqm) {
    double max_field = 0.0;
    std::vector<double> reach(static_cast<std::size_t>(bqm.num_vars), 0.0);
    double min_coeff = std::numeric_limits<double>::infinity();
    for (int i = 0; i < bqm.num_vars; ++i) {
        const double a = std::abs(bqm.linear[static_cast<std::size_t>(i)]);
        reach[static_cast<std::size_t>(i)] += a;
        if (a > 0.0) min_coeff = std::min(min_coeff, a);
    }
    for (const auto& [key, value] : bqm.quadratic) {
        const double a = std::abs(value);
        reach[static_cast<std::size_t>(key.first)] += a;
        reach[static_cast<std::size_t>(key.second)] += a;
        if (a > 0.0) min_coeff = std::min(min_coeff, a);
    }
    for (double r : reach) max_field = std::max(max_field, r);
    if (!std::isfinite(min_coeff) || max_field == 0.0) return {1.0, 2.0};
    return {std::log(2.0) / max_field, std::log(100.0) / min_coeff};
}

SampleSet finalize(const Bqm& bqm, std::vector<SampleSet::Entry>&& entries, std::string name, Clock::time_point start) {
    // Entries re-scored against the model, so incremental drift cannot leak.
    for (auto& entry : entries) entry.energy = energy(bqm, entry.bits);
    std::sort(entries.begin(), entries.end(), [](const SampleSet::Entry& a, const SampleSet::Entry& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return a.bits < b.bits;
    });
    SampleSet out;
    out.entries = std::move(entries);
    out.sampler = std::move(name);
    out.elapsed_s = seconds_since(start);
    return out;
}

void require_nonempty(const Bqm& bqm, const char* who) {
    if (bqm.num_vars < 1) throw std::invalid_argument(std::string(who) + ": model has no variables");
}

}  // namespace

SampleSet simulated_annealing(const Bqm& bqm, const SamplerParams& params) {
    require_nonempty(bqm, "simulated_annealing");
    params.validate();
    const auto start = Clock::now();
    const Compiled model(bqm);
    const SaSchedule schedule = params.sa ? *params.sa : auto_schedule(bqm);
    const double ratio = schedule.beta_max / schedule.beta_min;

    std::vector<SampleSet::Entry> entries;
    entries.reserve(static_cast<std::size_t>(params.num_reads));
    for (int read = 0; read < params.num_reads; ++read) {
        Rng rng(params.seed, static_cast<std::uint64_t>(read));
        std::vector<std::uint8_t> x(static_cast<std::size_t>(model.n));
        random_state(rng, x);
        std::vector<double> field;
        model.init_fields(x, field);

        double e = energy(bqm, x);
        double best_e = e;
        std::vector<std::uint8_t> best_x = x;

        for (int sweep = 0; sweep < params.sweeps; ++sweep) {
            const double frac = params.sweeps > 1 ? static_cast<double>(sweep) / (params.sweeps - 1) : 1.0;
            const double beta = schedule.beta_min * std::pow(ratio, frac);
            for (int i = 0; i < model.n; ++i) {
                const double delta = (x[static_cast<std::size_t>(i)] ? -1.0 : 1.0) * field[static_cast<std::size_t>(i)];
                if (delta <= 0.0 || rng.next_double() < std::exp(-beta * delta)) {
                    model.apply_flip(i, x, field);
                    e += delta;
                    if (e < best_e) {
                        best_e = e;
                        best_x = x;
                    }
                }
            }
        }
        entries.push_back({std::move(best_x), best_e});
    }
    return finalize(bqm, std::move(entries), "sa", start);
}

SampleSet tabu_search(const Bqm& bqm, const SamplerParams& params) {
    require_nonempty(bqm, "tabu_search");
    params.validate();
    const auto start = Clock::now();
    const Compiled model(bqm);
    const TabuParams tabu = params.tabu ? *params.tabu : TabuParams{std::clamp(model.n / 10, 4, 20), 1};

    std::vector<SampleSet::Entry> entries;
    entries.reserve(static_cast<std::size_t>(params.num_reads));
    for (int read = 0; read < params.num_reads; ++read) {
        Rng rng(params.seed, 0x7462750000ULL + static_cast<std::uint64_t>(read));
        std::vector<std::uint8_t> x(static_cast<std::size_t>(model.n));
        std::vector<double> field;
        double best_e = std::numeric_limits<double>::infinity();
        std::vector<std::uint8_t> best_x;

        for (int phase = 0; phase <= tabu.restarts; ++phase) {
            random_state(rng, x);
            model.init_fields(x, field);
            double e = energy(bqm, x);
            if (e < best_e) {
                best_e = e;
                best_x = x;
            }
            std::vector<long long> tabu_until(static_cast<std::size_t>(model.n), -1);
            for (long long step = 0; step < params.sweeps; ++step) {
                int chosen = -1;
                double chosen_delta = 0.0;
                for (int i = 0; i < model.n; ++i) {
                    const double delta = (x[static_cast<std::size_t>(i)] ? -1.0 : 1.0) * field[static_cast<std::size_t>(i)];
                    const bool is_tabu = tabu_until[static_cast<std::size_t>(i)] > step;
                    // Aspiration: a tabu move that beats the incumbent is allowed.
                    if (is_tabu && !(e + delta < best_e)) continue;
                    if (chosen < 0 || delta < chosen_delta) {
                        chosen = i;
                        chosen_delta = delta;
                    }
                }
                if (chosen < 0) break;  // everything tabu and nothing aspirates
                model.apply_flip(chosen, x, field);
                e += chosen_delta;
                tabu_until[static_cast<std::size_t>(chosen)] = step + tabu.tenure;
                if (e < best_e) {
                    best_e = e;
                    best_x = x;
                }
            }
        }
        entries.push_back({std::move(best_x), best_e});
    }
    return finalize(bqm, std::move(entries), "tabu", start);
}

SampleSet simulated_quantum_annealing(const Bqm& bqm, const SamplerParams& params) {
    require_nonempty(bqm, "simulated_quantum_annealing");
    params.validate();
    const auto start = Clock::now();
    const SqaParams sqa = params.sqa ? *params.sqa : SqaParams{};
    const int slices = sqa.trotter_slices;

    const IsingModel ising = to_ising(bqm);
    // Reuse the CSR layout for the Ising couplings.
    Bqm coupling = Bqm::empty(ising.num_vars);
    coupling.quadratic = ising.j;
    const Compiled model(coupling);
    const int n = ising.num_vars;

    std::vector<SampleSet::Entry> entries;
    entries.reserve(static_cast<std::size_t>(params.num_reads));
    for (int read = 0; read < params.num_reads; ++read) {
        Rng rng(params.seed, 0x7371610000ULL + static_cast<std::uint64_t>(read));

        std::vector<std::vector<std::int8_t>> spins(
            static_cast<std::size_t>(slices), std::vector<std::int8_t>(static_cast<std::size_t>(n), 1));
        for (auto& replica : spins) {
            for (auto& s : replica) s = rng.next_bit() ? 1 : -1;
        }

        // Per-replica classical energy, tracked incrementally.
        std::vector<double> replica_energy(static_cast<std::size_t>(slices));
        for (int p = 0; p < slices; ++p) {
            replica_energy[static_cast<std::size_t>(p)] = ising_energy(ising, spins[static_cast<std::size_t>(p)]);
        }
        double best_e = replica_energy[0];
        std::vector<std::int8_t> best_spins = spins[0];
        for (int p = 1; p < slices; ++p) {
            if (replica_energy[static_cast<std::size_t>(p)] < best_e) {
                best_e = replica_energy[static_cast<std::size_t>(p)];
                best_spins = spins[static_cast<std::size_t>(p)];
            }
        }

        const double slice_temp = static_cast<double>(slices) * sqa.temperature;
        for (int sweep = 0; sweep < params.sweeps; ++sweep) {
            const double frac = params.sweeps > 1 ? static_cast<double>(sweep) / (params.sweeps - 1) : 1.0;
            const double gamma = std::max(sqa.gamma_initial + (sqa.gamma_final - sqa.gamma_initial) * frac, 1e-12);
            // Ferromagnetic coupling between adjacent replicas; diverges as
            // gamma -> 0, locking the replicas together.
            const double j_perp = -0.5 * slice_temp * std::log(std::tanh(gamma / slice_temp));

            for (int p = 0; p < slices; ++p) {
                auto& replica = spins[static_cast<std::size_t>(p)];
                const auto& prev = spins[static_cast<std::size_t>((p + slices - 1) % slices)];
                const auto& next = spins[static_cast<std::size_t>((p + 1) % slices)];
                for (int i = 0; i < n; ++i) {
                    double local = ising.h[static_cast<std::size_t>(i)];
                    for (int e = model.row_start[static_cast<std::size_t>(i)]; e < model.row_start[static_cast<std::size_t>(i) + 1]; ++e) {
                        local += model.coeff[static_cast<std::size_t>(e)] * replica[static_cast<std::size_t>(model.col[static_cast<std::size_t>(e)])];
                    }
                    const double s = replica[static_cast<std::size_t>(i)];
                    const double delta_classical = -2.0 * s * local;
                    const double delta = delta_classical / slices +
                                         2.0 * j_perp * s * (prev[static_cast<std::size_t>(i)] + next[static_cast<std::size_t>(i)]);
                    if (delta <= 0.0 || rng.next_double() < std::exp(-delta / sqa.temperature)) {
                        replica[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(-replica[static_cast<std::size_t>(i)]);
                        replica_energy[static_cast<std::size_t>(p)] += delta_classical;
                    }
                }
            }
            for (int p = 0; p < slices; ++p) {
                if (replica_energy[static_cast<std::size_t>(p)] < best_e) {
                    best_e = replica_energy[static_cast<std::size_t>(p)];
                    best_spins = spins[static_cast<std::size_t>(p)];
                }
            }
        }

        std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) bits[static_cast<std::size_t>(i)] = best_spins[static_cast<std::size_t>(i)] > 0 ? 1 : 0;
        entries.push_back({std::move(bits), best_e});
    }
    return finalize(bqm, std::move(entries), "sqa", start);
}

}  // namespace fjsp
