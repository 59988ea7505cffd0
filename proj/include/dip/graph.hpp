#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dip {

// Edge tag of a union graph: which input graph(s) contain the edge.
enum class EdgeLabel : uint8_t { G0 = 1, G1 = 2, Both = 3 };

class GraphError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Port-numbered undirected connected graph. Port p of u is adj[u][p]; the
// order is the order edges were supplied.
struct Graph {
    int n = 0;
    std::vector<std::vector<int>> adj;
    std::vector<std::vector<EdgeLabel>> labels;
    std::vector<std::vector<uint8_t>> inputs;

    int deg(int u) const { return static_cast<int>(adj[u].size()); }
    int port_of(int u, int v) const;
    bool has_edge(int u, int v) const { return port_of(u, v) >= 0; }
    size_t edge_count() const;
    // Each edge once as (min, max), in order of first appearance.
    std::vector<std::pair<int, int>> edges() const;
    // Neighbors of u in the input graph g (0 or 1) of a union graph.
    std::vector<int> neighbors_in(int u, int g) const;
    bool operator==(const Graph& o) const { return n == o.n && adj == o.adj && labels == o.labels; }
};

struct LabeledEdge {
    int u;
    int v;
    EdgeLabel label = EdgeLabel::Both;
};

// Builds and validates: no self-loops, no duplicates, connected.
Graph make_graph(int n, const std::vector<LabeledEdge>& edges, bool require_connected = true);
Graph make_graph(int n, const std::vector<std::pair<int, int>>& edges, bool require_connected = true);

bool is_connected(const Graph& g);
bool is_connected(int n, const std::vector<std::vector<int>>& adj);

// "n=<int>" then "u v [g0|g1|both]" per line; '#' starts a comment.
Graph load_graph(const std::string& text);
std::string dump_graph(const Graph& g);

using Params = std::map<std::string, std::string>;

// kinds: path, cycle, clique, star, tree, gnp, smallest_asymmetric,
// planted_clique. Deterministic in (kind, params, seed).
Graph generate_graph(const std::string& kind, const Params& params, uint64_t seed);
// "kind:a,b" shorthand, e.g. "clique:8" or "planted_clique:8,4".
Graph generate_from_spec(const std::string& spec, uint64_t seed);

Graph path_graph(int n);
Graph cycle_graph(int n);
Graph clique_graph(int n);
Graph star_graph(int leaves);
Graph random_tree(int n, uint64_t seed);
Graph gnp_graph(int n, double p, uint64_t seed);
Graph smallest_asymmetric();
// A second rigid 6-vertex graph, not isomorphic to smallest_asymmetric().
Graph rigid_companion();
// Nodes 0..k-1 form a clique; the rest is a connected G(n,p) attachment.
Graph planted_clique(int n, int k, uint64_t seed, double p = 0.3);

Graph union_graph(const Graph& g0, const Graph& g1);

// Image of g under the vertex permutation pi (v -> pi[v]); ports follow the
// order of g's adjacency relabeled.
Graph permute_graph(const Graph& g, const std::vector<int>& pi);
// Adjacency rows as bitmasks (n <= 64).
std::vector<uint64_t> adjacency_rows(const Graph& g);
std::vector<uint64_t> adjacency_rows(int n, const std::vector<std::vector<int>>& adj);

} // namespace dip
