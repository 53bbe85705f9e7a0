#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fjsp/qubo.hpp"

namespace fjsp {

// Hardware qubit graph. Nodes are arbitrary non-negative qubit ids.
struct Topology {
    std::string name;
    std::vector<int> nodes;                  // sorted, unique
    std::vector<std::pair<int, int>> edges;  // u < v, sorted, unique

    std::size_t num_nodes() const { return nodes.size(); }
    std::size_t num_edges() const { return edges.size(); }
    bool has_edge(int u, int v) const;
};

// rows x cols cells of K_{shore,shore}, with co-aligned qubits of adjacent
// cells connected. Node count rows*cols*2*shore.
Topology chimera(int rows, int cols, int shore);

// Edge-list file: one "u v" pair per line, '#' comments. Duplicate edges
// collapse; malformed lines raise std::runtime_error with the line number.
Topology load_topology(const std::filesystem::path& path);

// "chimera:R,C,S" or "file:<path>".
Topology parse_topology_spec(const std::string& spec);

// Map from logical variable to its chain of physical qubits.
struct Embedding {
    std::map<int, std::vector<int>> chains;  // chain qubits sorted

    long long total_qubits() const;  // n_e
};

struct EmbeddingResult {
    std::optional<Embedding> embedding;
    std::string diagnostic;  // set on failure
    bool ok() const { return embedding.has_value(); }
};

// Heuristic minor embedding: seeded randomized placement passes routing each
// chain by shortest paths under node weights that grow with qubit load,
// until chains are disjoint, then refinement passes re-routing the longest
// chains. Failure (a value, not an error) reports the first variable that
// could not be placed and the number of free qubits.
EmbeddingResult find_embedding(const LogicalGraph& graph, const Topology& topology, std::uint64_t seed, int effort = 32);

// Empty iff chains are pairwise disjoint, each induces a connected subgraph
// of the topology and every logical edge has a physical edge between its
// chains.
std::vector<std::string> check_embedding(const LogicalGraph& graph, const Topology& topology, const Embedding& embedding);

// Ising problem over physical qubit ids.
struct PhysicalIsing {
    std::map<int, double> h;
    std::map<std::pair<int, int>, double> j;  // keys u < v
    double offset = 0.0;
};

// Splits each logical field equally across its chain, places each logical
// coupling on one connecting physical edge and adds -chain_strength on every
// intra-chain edge of the topology.
PhysicalIsing embed_ising(const IsingModel& ising, const Embedding& embedding, const Topology& topology,
                          double chain_strength);
PhysicalIsing embed_bqm(const Bqm& bqm, const Embedding& embedding, const Topology& topology, double chain_strength);

// 1.5x the largest absolute Ising coefficient (floor 1).
double default_chain_strength(const IsingModel& ising);

// Per-chain majority vote; exact ties resolve to whichever value gives the
// lower logical energy, remaining ties to 0.
std::vector<std::uint8_t> unembed(const std::map<int, std::uint8_t>& physical_bits, const Embedding& embedding,
                                  const Bqm& bqm);

// Dense relabeling of a physical problem for the samplers.
struct CompactIsing {
    IsingModel model;
    std::vector<int> qubit_ids;  // dense index -> qubit id
};
CompactIsing compact_physical(const PhysicalIsing& problem);

}  // namespace fjsp
