#pragma once

// Oracles and generators shared by the tests. Everything here is written
// against plain containers, independently of the library code under test.

#include "dip/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace testutil {

using EdgeSet = std::set<std::pair<int, int>>;

inline EdgeSet edge_set(const dip::Graph& g)
{
    EdgeSet s;
    for (int u = 0; u < g.n; ++u) {
        for (int v : g.adj[u]) {
            s.insert({std::min(u, v), std::max(u, v)});
        }
    }
    return s;
}

inline bool symmetric(const dip::Graph& g)
{
    for (int u = 0; u < g.n; ++u) {
        for (int v : g.adj[u]) {
            if (std::count(g.adj[v].begin(), g.adj[v].end(), u) != 1) {
                return false;
            }
        }
    }
    return true;
}

inline bool connected(const dip::Graph& g)
{
    if (g.n == 0) {
        return true;
    }
    std::vector<char> seen(g.n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : g.adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == g.n;
}

// Permutations pi with {pi(u), pi(v)} an edge for every edge {u, v}.
inline uint64_t brute_automorphisms(const dip::Graph& g)
{
    EdgeSet e = edge_set(g);
    std::vector<int> pi(g.n);
    std::iota(pi.begin(), pi.end(), 0);
    uint64_t count = 0;
    do {
        bool ok = true;
        for (auto [u, v] : e) {
            int a = pi[u], b = pi[v];
            if (!e.count({std::min(a, b), std::max(a, b)})) {
                ok = false;
                break;
            }
        }
        count += ok ? 1 : 0;
    } while (std::next_permutation(pi.begin(), pi.end()));
    return count;
}

inline bool is_automorphism(const dip::Graph& g, const std::vector<int>& pi)
{
    EdgeSet e = edge_set(g);
    for (auto [u, v] : e) {
        int a = pi[u], b = pi[v];
        if (!e.count({std::min(a, b), std::max(a, b)})) {
            return false;
        }
    }
    return true;
}

// Random labeled tree by attaching each vertex to a uniform earlier one,
// then shuffling vertex names.
inline dip::Graph random_tree_graph(int n, std::mt19937_64& rng)
{
    std::vector<int> name(n);
    std::iota(name.begin(), name.end(), 0);
    std::shuffle(name.begin(), name.end(), rng);
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < n; ++v) {
        int u = static_cast<int>(rng() % static_cast<uint64_t>(v));
        edges.push_back({name[u], name[v]});
    }
    return dip::make_graph(n, edges);
}

// A random tree plus extra random edges, connected by construction.
inline dip::Graph random_connected_graph(int n, double extra, std::mt19937_64& rng)
{
    dip::Graph t = random_tree_graph(n, rng);
    EdgeSet e = edge_set(t);
    std::vector<std::pair<int, int>> edges(e.begin(), e.end());
    std::shuffle(edges.begin(), edges.end(), rng);
    std::bernoulli_distribution coin(extra);
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (!e.count({u, v}) && coin(rng)) {
                edges.push_back({u, v});
            }
        }
    }
    return dip::make_graph(n, edges);
}

// Three binomial standard deviations of a rate estimated from `trials` runs.
inline double three_sigma(double p, size_t trials)
{
    return 3.0 * std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(trials));
}

// Parent pointers (-1 for a root) form a spanning tree of g: one root,
// every pointer along an edge, and every walk up reaches the root.
inline bool spanning_tree(const dip::Graph& g, const std::vector<int>& parent)
{
    int roots = 0;
    for (int u = 0; u < g.n; ++u) {
        if (parent[u] < 0) {
            ++roots;
        } else if (!g.has_edge(u, parent[u])) {
            return false;
        }
    }
    if (roots != 1) {
        return false;
    }
    for (int u = 0; u < g.n; ++u) {
        int x = u;
        for (int steps = 0; parent[x] >= 0; ++steps) {
            if (steps > g.n) {
                return false;
            }
            x = parent[x];
        }
    }
    return true;
}

// The decomposition of a rooted tree into blocks (root, non-root members),
// checked property by property. Returns an empty string when all hold:
// sizes in [b, 2b] and [min(b, n), 3b] for the top block; every tree edge
// in exactly one block, each block a connected subtree; two blocks share at
// most one node and it is a root; the block parent relation is a tree.
struct PlainBlock {
    int root;
    std::vector<int> members;
};

inline std::string block_properties(int n, const std::vector<int>& parent, const std::vector<PlainBlock>& blocks,
                                    int top, int b)
{
    const int k = static_cast<int>(blocks.size());
    if (top < 0 || top >= k) {
        return "no top block";
    }
    for (int i = 0; i < k; ++i) {
        size_t size = blocks[i].members.size() + 1;
        size_t lo = i == top ? static_cast<size_t>(std::min(b, n)) : static_cast<size_t>(b);
        size_t hi = static_cast<size_t>(i == top ? 3 * b : 2 * b);
        if (size < lo || size > hi) {
            return "block " + std::to_string(i) + " has size " + std::to_string(size);
        }
    }
    std::vector<int> home(n, -1);
    for (int i = 0; i < k; ++i) {
        std::set<int> nodes{blocks[i].root};
        for (int m : blocks[i].members) {
            if (home[m] >= 0 || parent[m] < 0) {
                return "node " + std::to_string(m) + " is a non-root member twice or is the tree root";
            }
            home[m] = i;
            nodes.insert(m);
        }
        for (int m : blocks[i].members) {
            if (nodes.count(parent[m]) == 0) {
                return "block " + std::to_string(i) + " is not a subtree";
            }
        }
    }
    for (int u = 0; u < n; ++u) {
        if (parent[u] >= 0 && home[u] < 0) {
            return "edge above " + std::to_string(u) + " is in no block";
        }
    }
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            std::vector<int> shared;
            std::set<int> a{blocks[i].root};
            a.insert(blocks[i].members.begin(), blocks[i].members.end());
            std::set<int> bset{blocks[j].root};
            bset.insert(blocks[j].members.begin(), blocks[j].members.end());
            std::set_intersection(a.begin(), a.end(), bset.begin(), bset.end(), std::back_inserter(shared));
            if (shared.size() > 1) {
                return "blocks share more than one node";
            }
            if (shared.size() == 1 && shared[0] != blocks[i].root && shared[0] != blocks[j].root) {
                return "blocks share a non-root node";
            }
        }
    }
    if (parent[blocks[top].root] >= 0) {
        return "top block is not rooted at the tree root";
    }
    // The tree root belongs to the top block.
    home[blocks[top].root] = top;
    for (int i = 0; i < k; ++i) {
        int x = i;
        for (int steps = 0; x != top; ++steps) {
            if (steps > k) {
                return "block parents cycle";
            }
            x = home[blocks[x].root];
            if (x < 0) {
                return "block " + std::to_string(i) + " hangs off nothing";
            }
        }
    }
    return "";
}

// Whether some K nodes are pairwise adjacent, by subset enumeration.
inline bool has_clique(const dip::Graph& g, int K)
{
    if (K > g.n) {
        return false;
    }
    std::vector<int> pick(g.n, 0);
    std::fill(pick.end() - K, pick.end(), 1);
    do {
        std::vector<int> s;
        for (int u = 0; u < g.n; ++u) {
            if (pick[u]) {
                s.push_back(u);
            }
        }
        bool ok = true;
        for (size_t i = 0; i < s.size() && ok; ++i) {
            for (size_t j = i + 1; j < s.size() && ok; ++j) {
                ok = g.has_edge(s[i], s[j]);
            }
        }
        if (ok) {
            return true;
        }
    } while (std::next_permutation(pick.begin(), pick.end()));
    return false;
}

} // namespace testutil
