#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fjsp/qubo.hpp"

namespace fjsp {

struct SaSchedule {
    double beta_min = 0.1;
    double beta_max = 10.0;
};

struct TabuParams {
    int tenure = 16;
    int restarts = 1;  // additional random restarts per read
};

struct SqaParams {
    int trotter_slices = 8;      // P
    double temperature = 0.1;    // per-slice simulation temperature
    double gamma_initial = 3.0;  // transverse field at the first sweep
    double gamma_final = 0.05;   // transverse field at the last sweep
};

// Shared sampler knobs. `sweeps` is the per-read schedule length; samplers
// are deterministic functions of (bqm, params).
struct SamplerParams {
    std::uint64_t seed = 0;
    int num_reads = 1;
    int sweeps = 1000;
    std::optional<SaSchedule> sa;      // absent: auto-scaled from coefficients
    std::optional<TabuParams> tabu;    // absent: defaults
    std::optional<SqaParams> sqa;      // absent: defaults

    void validate() const;  // throws std::invalid_argument
};

struct SampleSet {
    struct Entry {
        std::vector<std::uint8_t> bits;
        double energy = 0.0;
    };
    std::vector<Entry> entries;  // ascending by (energy, bits)
    std::string sampler;
    double elapsed_s = 0.0;

    const Entry& best() const { return entries.front(); }
};

// Single-flip Metropolis annealing with a geometric inverse-temperature
// schedule. One entry per read: the best state visited during that read.
SampleSet simulated_annealing(const Bqm& bqm, const SamplerParams& params);

// Steepest-descent single-flip search with a recency tabu list, aspiration
// on the incumbent and random restarts.
SampleSet tabu_search(const Bqm& bqm, const SamplerParams& params);

// Path-integral Monte Carlo over `trotter_slices` coupled replicas with a
// linearly decaying transverse field; the classical stand-in for annealing
// hardware. One entry per read: the best single-replica state visited.
SampleSet simulated_quantum_annealing(const Bqm& bqm, const SamplerParams& params);

}  // namespace fjsp
