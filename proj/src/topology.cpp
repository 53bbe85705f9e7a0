#include "fjsp/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fjsp/rng.hpp"

namespace fjsp {

bool Topology::has_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

Topology chimera(int rows, int cols, int shore) {
    if (rows < 1 || cols < 1 || shore < 1) throw std::invalid_argument("chimera: all dimensions must be >= 1");
    Topology topo;
    topo.name = "chimera:" + std::to_string(rows) + "," + std::to_string(cols) + "," + std::to_string(shore);
    const int per_cell = 2 * shore;
    auto qubit = [&](int r, int c, int side, int k) { return ((r * cols + c) * 2 + side) * shore + k; };

    const int total = rows * cols * per_cell;
    topo.nodes.resize(static_cast<std::size_t>(total));
    for (int q = 0; q < total; ++q) topo.nodes[static_cast<std::size_t>(q)] = q;

    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            // complete bipartite cell
            for (int a = 0; a < shore; ++a) {
                for (int b = 0; b < shore; ++b) {
                    topo.edges.push_back({qubit(r, c, 0, a), qubit(r, c, 1, b)});
                }
            }
            // vertical couplers (side 0) to the next row
            if (r + 1 < rows) {
                for (int k = 0; k < shore; ++k) topo.edges.push_back({qubit(r, c, 0, k), qubit(r + 1, c, 0, k)});
            }
            // horizontal couplers (side 1) to the next column
            if (c + 1 < cols) {
                for (int k = 0; k < shore; ++k) topo.edges.push_back({qubit(r, c, 1, k), qubit(r, c + 1, 1, k)});
            }
        }
    }
    for (auto& [u, v] : topo.edges) {
        if (u > v) std::swap(u, v);
    }
    std::sort(topo.edges.begin(), topo.edges.end());
    return topo;
}

Topology load_topology(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open topology file: " + path.string());
    Topology topo;
    topo.name = "file:" + path.string();
    std::set<int> nodes;
    std::set<std::pair<int, int>> edges;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        int u = 0, v = 0;
        if (!(ss >> u)) continue;  // blank or comment-only line
        std::string rest;
        if (!(ss >> v) || (ss >> rest) || u < 0 || v < 0 || u == v) {
            throw std::runtime_error("topology file " + path.string() + ", line " + std::to_string(line_no) +
                                     ": expected two distinct non-negative integers");
        }
        if (u > v) std::swap(u, v);
        nodes.insert(u);
        nodes.insert(v);
        edges.insert({u, v});
    }
    topo.nodes.assign(nodes.begin(), nodes.end());
    topo.edges.assign(edges.begin(), edges.end());
    return topo;
}

Topology parse_topology_spec(const std::string& spec) {
    if (spec.rfind("chimera:", 0) == 0) {
        const std::string args = spec.substr(8);
        int r = 0, c = 0, s = 0;
        char comma1 = 0, comma2 = 0;
        std::istringstream ss(args);
        if (!(ss >> r >> comma1 >> c >> comma2 >> s) || comma1 != ',' || comma2 != ',' || !ss.eof()) {
            throw std::runtime_error("topology spec '" + spec + "': expected chimera:R,C,S");
        }
        return chimera(r, c, s);
    }
    if (spec.rfind("file:", 0) == 0) return load_topology(spec.substr(5));
    throw std::runtime_error("topology spec '" + spec + "': expected 'chimera:R,C,S' or 'file:<path>'");
}

long long Embedding::total_qubits() const {
    long long total = 0;
    for (const auto& [var, chain] : chains) total += static_cast<long long>(chain.size());
    return total;
}

namespace {

// Compact adjacency over topology nodes (dense indices).
struct TopoIndex {
    std::vector<int> ids;  // dense -> node id
    std::map<int, int> dense;
    std::vector<std::vector<int>> adj;

    explicit TopoIndex(const Topology& topo) : ids(topo.nodes) {
        for (std::size_t i = 0; i < ids.size(); ++i) dense[ids[i]] = static_cast<int>(i);
        adj.resize(ids.size());
        for (const auto& [u, v] : topo.edges) {
            adj[static_cast<std::size_t>(dense.at(u))].push_back(dense.at(v));
            adj[static_cast<std::size_t>(dense.at(v))].push_back(dense.at(u));
        }
        for (auto& list : adj) std::sort(list.begin(), list.end());
    }
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Node weight diverging with the number of chains already using the qubit.
double qubit_weight(int load, int num_qubits) {
    if (load <= 0) return 1.0;
    double w = 1.0;
    for (int i = 0; i < std::min(load, 4); ++i) w *= static_cast<double>(num_qubits);
    return w;
}

struct Router {
    const TopoIndex& topo;
    int num_qubits;
    std::vector<int> load;                      // chains per qubit
    std::vector<std::vector<int>> chains;       // per variable, dense qubit ids
    const std::vector<std::vector<int>>& neighbors;  // logical adjacency

    std::vector<double> dist;
    std::vector<int> parent;
    std::vector<double> score;

    Router(const TopoIndex& t, int num_vars, const std::vector<std::vector<int>>& logical_neighbors)
        : topo(t),
          num_qubits(static_cast<int>(t.ids.size())),
          load(t.ids.size(), 0),
          chains(static_cast<std::size_t>(num_vars)),
          neighbors(logical_neighbors),
          dist(t.ids.size()),
          parent(t.ids.size()),
          score(t.ids.size()) {}

    void tear_out(int v) {
        for (int q : chains[static_cast<std::size_t>(v)]) load[static_cast<std::size_t>(q)] -= 1;
        chains[static_cast<std::size_t>(v)].clear();
    }

    void put_back(int v, std::vector<int>&& chain) {
        chains[static_cast<std::size_t>(v)] = std::move(chain);
        for (int q : chains[static_cast<std::size_t>(v)]) load[static_cast<std::size_t>(q)] += 1;
    }

    // Dijkstra from every qubit of `sources` under the load weights;
    // fills dist/parent. `blocked` weight callback allows strict routing.
    template <typename WeightFn>
    void shortest_paths(const std::vector<int>& sources, WeightFn&& weight) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(parent.begin(), parent.end(), -1);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        for (int q : sources) {
            dist[static_cast<std::size_t>(q)] = 0.0;
            heap.push({0.0, q});
        }
        while (!heap.empty()) {
            const auto [d, q] = heap.top();
            heap.pop();
            if (d > dist[static_cast<std::size_t>(q)]) continue;
            for (int r : topo.adj[static_cast<std::size_t>(q)]) {
                const double w = weight(r);
                if (w >= kInf) continue;
                const double nd = d + w;
                if (nd < dist[static_cast<std::size_t>(r)]) {
                    dist[static_cast<std::size_t>(r)] = nd;
                    parent[static_cast<std::size_t>(r)] = q;
                    heap.push({nd, r});
                }
            }
        }
    }

    // Re-route variable v. strict: only free qubits may be used (keeps an
    // already-valid embedding valid). Returns false if no placement exists.
    bool route(int v, bool strict) {
        tear_out(v);
        auto weight = [this, strict](int q) {
            if (strict && load[static_cast<std::size_t>(q)] > 0) return kInf;
            return qubit_weight(load[static_cast<std::size_t>(q)], num_qubits);
        };

        std::vector<int> placed_neighbors;
        for (int u : neighbors[static_cast<std::size_t>(v)]) {
            if (!chains[static_cast<std::size_t>(u)].empty()) placed_neighbors.push_back(u);
        }

        if (placed_neighbors.empty()) {
            // No routing target: take the cheapest qubit, preferring well
            // connected free ones.
            int best = -1;
            double best_cost = kInf;
            for (int q = 0; q < num_qubits; ++q) {
                const double w = weight(q);
                if (w >= kInf) continue;
                int free_neighbors = 0;
                for (int r : topo.adj[static_cast<std::size_t>(q)]) {
                    if (load[static_cast<std::size_t>(r)] == 0) ++free_neighbors;
                }
                const double cost = w - static_cast<double>(free_neighbors) / (num_qubits + 1.0);
                if (cost < best_cost) {
                    best_cost = cost;
                    best = q;
                }
            }
            if (best < 0) return false;
            put_back(v, {best});
            return true;
        }

        // Sum of shortest-path distances from every placed neighbor chain.
        std::vector<std::vector<int>> parents_per_source;
        std::fill(score.begin(), score.end(), 0.0);
        std::vector<char> reachable(static_cast<std::size_t>(num_qubits), 1);
        parents_per_source.reserve(placed_neighbors.size());
        for (int u : placed_neighbors) {
            shortest_paths(chains[static_cast<std::size_t>(u)], weight);
            for (int q = 0; q < num_qubits; ++q) {
                if (dist[static_cast<std::size_t>(q)] >= kInf) {
                    reachable[static_cast<std::size_t>(q)] = 0;
                } else {
                    score[static_cast<std::size_t>(q)] += dist[static_cast<std::size_t>(q)];
                }
            }
            parents_per_source.push_back(parent);
        }

        int root = -1;
        double best_score = kInf;
        for (int q = 0; q < num_qubits; ++q) {
            if (!reachable[static_cast<std::size_t>(q)]) continue;
            const double w = weight(q);
            if (w >= kInf) continue;
            // The root qubit itself is paid once, not once per path.
            const double total = score[static_cast<std::size_t>(q)] + w;
            bool in_source = false;
            for (int u : placed_neighbors) {
                const auto& chain = chains[static_cast<std::size_t>(u)];
                if (std::binary_search(chain.begin(), chain.end(), q)) {
                    in_source = true;
                    break;
                }
            }
            if (in_source) continue;  // chains must stay disjoint
            if (total < best_score) {
                best_score = total;
                root = q;
            }
        }
        if (root < 0) return false;

        std::set<int> chain{root};
        for (std::size_t s = 0; s < placed_neighbors.size(); ++s) {
            const auto& par = parents_per_source[s];
            const auto& source_chain = chains[static_cast<std::size_t>(placed_neighbors[s])];
            int q = root;
            // Walk back to the source chain; stop at its boundary.
            while (par[static_cast<std::size_t>(q)] >= 0) {
                q = par[static_cast<std::size_t>(q)];
                if (std::binary_search(source_chain.begin(), source_chain.end(), q)) break;
                chain.insert(q);
            }
        }
        put_back(v, std::vector<int>(chain.begin(), chain.end()));
        return true;
    }

    int max_load() const {
        int m = 0;
        for (int l : load) m = std::max(m, l);
        return m;
    }

    int free_qubits() const {
        int f = 0;
        for (int l : load) f += (l == 0);
        return f;
    }
};

}  // namespace

EmbeddingResult find_embedding(const LogicalGraph& graph, const Topology& topology, std::uint64_t seed, int effort) {
    EmbeddingResult result;
    if (effort < 1) effort = 1;
    if (graph.num_vars == 0) {
        result.embedding = Embedding{};
        return result;
    }
    if (static_cast<std::size_t>(graph.num_vars) > topology.num_nodes()) {
        result.diagnostic = "embedding failed: " + std::to_string(graph.num_vars) + " variables exceed " +
                            std::to_string(topology.num_nodes()) + " qubits";
        return result;
    }

    const TopoIndex topo(topology);
    std::vector<std::vector<int>> logical_adj(static_cast<std::size_t>(graph.num_vars));
    for (const auto& [u, v] : graph.edges) {
        if (u < 0 || v < 0 || u >= graph.num_vars || v >= graph.num_vars) {
            throw std::invalid_argument("find_embedding: edge endpoint out of range");
        }
        logical_adj[static_cast<std::size_t>(u)].push_back(v);
        logical_adj[static_cast<std::size_t>(v)].push_back(u);
    }

    Router router(topo, graph.num_vars, logical_adj);
    Rng rng(seed, 0x656d6265640000ULL);

    std::vector<int> order(static_cast<std::size_t>(graph.num_vars));
    for (int v = 0; v < graph.num_vars; ++v) order[static_cast<std::size_t>(v)] = v;

    // Overlap-resolution passes: chains may share qubits at first; the load
    // weights push them apart a little more every pass.
    bool valid = false;
    int failed_var = -1;
    for (int pass = 0; pass < effort && !valid; ++pass) {
        rng.shuffle(order);
        bool all_placed = true;
        for (int v : order) {
            if (!router.route(v, /*strict=*/false)) {
                failed_var = v;
                all_placed = false;
                break;
            }
        }
        if (all_placed && router.max_load() <= 1) valid = true;
    }
    if (!valid) {
        if (failed_var < 0) {
            // Chains placed but still overlapping after the effort budget.
            for (int v = 0; v < graph.num_vars && failed_var < 0; ++v) {
                for (int q : router.chains[static_cast<std::size_t>(v)]) {
                    if (router.load[static_cast<std::size_t>(q)] > 1) {
                        failed_var = v;
                        break;
                    }
                }
            }
        }
        result.diagnostic = "embedding failed: variable " + std::to_string(failed_var) + " unplaceable after " +
                            std::to_string(effort) + " passes (" + std::to_string(router.free_qubits()) +
                            " qubits free)";
        return result;
    }

    // Refinement: re-route the longest chains through free qubits only,
    // keeping a change only when it shrinks the chain.
    for (int pass = 0; pass < effort; ++pass) {
        std::vector<int> by_length(order.begin(), order.end());
        std::sort(by_length.begin(), by_length.end(), [&router](int a, int b) {
            return router.chains[static_cast<std::size_t>(a)].size() > router.chains[static_cast<std::size_t>(b)].size();
        });
        bool improved = false;
        for (int v : by_length) {
            const std::vector<int> old_chain = router.chains[static_cast<std::size_t>(v)];
            if (old_chain.size() <= 1) continue;
            if (!router.route(v, /*strict=*/true)) {
                router.tear_out(v);
                router.put_back(v, std::vector<int>(old_chain));
                continue;
            }
            if (router.chains[static_cast<std::size_t>(v)].size() >= old_chain.size()) {
                router.tear_out(v);
                router.put_back(v, std::vector<int>(old_chain));
            } else {
                improved = true;
            }
        }
        if (!improved) break;
    }

    Embedding embedding;
    for (int v = 0; v < graph.num_vars; ++v) {
        std::vector<int> chain;
        chain.reserve(router.chains[static_cast<std::size_t>(v)].size());
        for (int q : router.chains[static_cast<std::size_t>(v)]) chain.push_back(topo.ids[static_cast<std::size_t>(q)]);
        std::sort(chain.begin(), chain.end());
        embedding.chains[v] = std::move(chain);
    }

    const auto problems = check_embedding(graph, topology, embedding);
    if (!problems.empty()) {
        result.diagnostic = "embedding failed: internal validity check: " + problems.front();
        return result;
    }
    result.embedding = std::move(embedding);
    return result;
}

std::vector<std::string> check_embedding(const LogicalGraph& graph, const Topology& topology, const Embedding& embedding) {
    std::vector<std::string> problems;
    std::set<int> used;
    std::set<int> node_set(topology.nodes.begin(), topology.nodes.end());

    for (int v = 0; v < graph.num_vars; ++v) {
        const auto it = embedding.chains.find(v);
        if (it == embedding.chains.end() || it->second.empty()) {
            problems.push_back("variable " + std::to_string(v) + " has no chain");
            continue;
        }
        const auto& chain = it->second;
        for (int q : chain) {
            if (!node_set.count(q)) {
                problems.push_back("variable " + std::to_string(v) + ": qubit " + std::to_string(q) + " not in topology");
            }
            if (!used.insert(q).second) {
                problems.push_back("qubit " + std::to_string(q) + " used by more than one chain");
            }
        }
        // Connectivity via BFS within the chain.
        std::set<int> chain_set(chain.begin(), chain.end());
        std::set<int> visited;
        std::vector<int> stack{chain.front()};
        visited.insert(chain.front());
        while (!stack.empty()) {
            const int q = stack.back();
            stack.pop_back();
            for (int r : chain) {
                if (!visited.count(r) && topology.has_edge(q, r)) {
                    visited.insert(r);
                    stack.push_back(r);
                }
            }
        }
        if (visited.size() != chain_set.size()) {
            problems.push_back("variable " + std::to_string(v) + ": chain is not connected");
        }
    }

    for (const auto& [u, v] : graph.edges) {
        const auto cu = embedding.chains.find(u);
        const auto cv = embedding.chains.find(v);
        if (cu == embedding.chains.end() || cv == embedding.chains.end()) continue;
        bool connected = false;
        for (int a : cu->second) {
            for (int b : cv->second) {
                if (topology.has_edge(a, b)) {
                    connected = true;
                    break;
                }
            }
            if (connected) break;
        }
        if (!connected) {
            problems.push_back("logical edge (" + std::to_string(u) + ", " + std::to_string(v) +
                               ") has no physical edge between chains");
        }
    }
    return problems;
}

PhysicalIsing embed_ising(const IsingModel& ising, const Embedding& embedding, const Topology& topology,
                          double chain_strength) {
    PhysicalIsing physical;
    physical.offset = ising.offset;
    for (int v = 0; v < ising.num_vars; ++v) {
        const auto it = embedding.chains.find(v);
        if (it == embedding.chains.end() || it->second.empty()) {
            throw std::invalid_argument("embed: variable " + std::to_string(v) + " has no chain");
        }
        const auto& chain = it->second;
        const double share = ising.h[static_cast<std::size_t>(v)] / static_cast<double>(chain.size());
        for (int q : chain) physical.h[q] += share;
        // Ferromagnetic bonds on every topology edge inside the chain.
        for (std::size_t a = 0; a < chain.size(); ++a) {
            for (std::size_t b = a + 1; b < chain.size(); ++b) {
                if (topology.has_edge(chain[a], chain[b])) {
                    auto key = std::minmax(chain[a], chain[b]);
                    physical.j[{key.first, key.second}] += -chain_strength;
                }
            }
        }
    }
    for (const auto& [pair, coupling] : ising.j) {
        const auto& cu = embedding.chains.at(pair.first);
        const auto& cv = embedding.chains.at(pair.second);
        bool placed = false;
        for (int a : cu) {
            for (int b : cv) {
                if (topology.has_edge(a, b)) {
                    auto key = std::minmax(a, b);
                    physical.j[{key.first, key.second}] += coupling;
                    placed = true;
                    break;
                }
            }
            if (placed) break;
        }
        if (!placed) {
            throw std::invalid_argument("embed: no physical edge for logical coupling (" + std::to_string(pair.first) +
                                        ", " + std::to_string(pair.second) + ")");
        }
    }
    return physical;
}

PhysicalIsing embed_bqm(const Bqm& bqm, const Embedding& embedding, const Topology& topology, double chain_strength) {
    return embed_ising(to_ising(bqm), embedding, topology, chain_strength);
}

double default_chain_strength(const IsingModel& ising) {
    double largest = 0.0;
    for (double h : ising.h) largest = std::max(largest, std::abs(h));
    for (const auto& [key, j] : ising.j) {
        (void)key;
        largest = std::max(largest, std::abs(j));
    }
    return 1.5 * std::max(largest, 1.0 / 1.5);
}

std::vector<std::uint8_t> unembed(const std::map<int, std::uint8_t>& physical_bits, const Embedding& embedding,
                                  const Bqm& bqm) {
    std::vector<std::uint8_t> logical(static_cast<std::size_t>(bqm.num_vars), 0);
    std::vector<int> tied;
    for (int v = 0; v < bqm.num_vars; ++v) {
        const auto it = embedding.chains.find(v);
        if (it == embedding.chains.end() || it->second.empty()) {
            throw std::invalid_argument("unembed: variable " + std::to_string(v) + " has no chain");
        }
        int ones = 0;
        for (int q : it->second) {
            const auto bit = physical_bits.find(q);
            if (bit == physical_bits.end()) throw std::invalid_argument("unembed: sample misses qubit " + std::to_string(q));
            ones += bit->second ? 1 : 0;
        }
        const int zeros = static_cast<int>(it->second.size()) - ones;
        if (ones > zeros) {
            logical[static_cast<std::size_t>(v)] = 1;
        } else if (ones == zeros) {
            tied.push_back(v);  // resolved below against the logical model
        }
    }
    // Broken chains with an exact tie: pick the value with lower energy in
    // index order, given everything resolved so far; ties stay 0.
    for (int v : tied) {
        logical[static_cast<std::size_t>(v)] = 0;
        const double e0 = energy(bqm, logical);
        logical[static_cast<std::size_t>(v)] = 1;
        const double e1 = energy(bqm, logical);
        logical[static_cast<std::size_t>(v)] = e1 < e0 ? 1 : 0;
    }
    return logical;
}

CompactIsing compact_physical(const PhysicalIsing& problem) {
    CompactIsing out;
    std::set<int> qubits;
    for (const auto& [q, h] : problem.h) {
        (void)h;
        qubits.insert(q);
    }
    for (const auto& [pair, j] : problem.j) {
        (void)j;
        qubits.insert(pair.first);
        qubits.insert(pair.second);
    }
    out.qubit_ids.assign(qubits.begin(), qubits.end());
    std::map<int, int> dense;
    for (std::size_t i = 0; i < out.qubit_ids.size(); ++i) dense[out.qubit_ids[i]] = static_cast<int>(i);

    out.model.num_vars = static_cast<int>(out.qubit_ids.size());
    out.model.h.assign(out.qubit_ids.size(), 0.0);
    out.model.offset = problem.offset;
    for (const auto& [q, h] : problem.h) out.model.h[static_cast<std::size_t>(dense.at(q))] += h;
    for (const auto& [pair, j] : problem.j) {
        auto key = std::minmax(dense.at(pair.first), dense.at(pair.second));
        out.model.j[{key.first, key.second}] += j;
    }
    return out;
}

}  // namespace fjsp
