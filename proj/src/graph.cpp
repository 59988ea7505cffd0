#include "dip/graph.hpp"

#include "dip/rng.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace dip {

int Graph::port_of(int u, int v) const
{
    const auto& a = adj[u];
    for (size_t p = 0; p < a.size(); ++p) {
        if (a[p] == v) {
            return static_cast<int>(p);
        }
    }
    return -1;
}

size_t Graph::edge_count() const
{
    size_t s = 0;
    for (const auto& a : adj) {
        s += a.size();
    }
    return s / 2;
}

std::vector<std::pair<int, int>> Graph::edges() const
{
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n; ++u) {
        for (int v : adj[u]) {
            if (u < v) {
                out.emplace_back(u, v);
            }
        }
    }
    return out;
}

std::vector<int> Graph::neighbors_in(int u, int g) const
{
    std::vector<int> out;
    auto bit = static_cast<uint8_t>(g == 0 ? 1 : 2);
    for (size_t p = 0; p < adj[u].size(); ++p) {
        if (static_cast<uint8_t>(labels[u][p]) & bit) {
            out.push_back(adj[u][p]);
        }
    }
    return out;
}

bool is_connected(int n, const std::vector<std::vector<int>>& adj)
{
    if (n <= 1) {
        return n == 1;
    }
    std::vector<char> seen(n, 0);
    std::vector<int> st{0};
    seen[0] = 1;
    int cnt = 1;
    while (!st.empty()) {
        int u = st.back();
        st.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++cnt;
                st.push_back(v);
            }
        }
    }
    return cnt == n;
}

bool is_connected(const Graph& g)
{
    return is_connected(g.n, g.adj);
}

Graph make_graph(int n, const std::vector<LabeledEdge>& edges, bool require_connected)
{
    if (n < 1) {
        throw GraphError("graph needs n >= 1");
    }
    Graph g;
    g.n = n;
    g.adj.assign(n, {});
    g.labels.assign(n, {});
    g.inputs.assign(n, {});
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
        if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
            throw GraphError("edge endpoint out of range");
        }
        if (e.u == e.v) {
            throw GraphError("self-loop at " + std::to_string(e.u));
        }
        auto key = std::minmax(e.u, e.v);
        if (!seen.insert(key).second) {
            throw GraphError("duplicate edge " + std::to_string(e.u) + " " + std::to_string(e.v));
        }
        g.adj[e.u].push_back(e.v);
        g.labels[e.u].push_back(e.label);
        g.adj[e.v].push_back(e.u);
        g.labels[e.v].push_back(e.label);
    }
    if (require_connected && !is_connected(g)) {
        throw GraphError("graph is disconnected");
    }
    return g;
}

Graph make_graph(int n, const std::vector<std::pair<int, int>>& edges, bool require_connected)
{
    std::vector<LabeledEdge> le;
    le.reserve(edges.size());
    for (auto [u, v] : edges) {
        le.push_back({u, v, EdgeLabel::Both});
    }
    return make_graph(n, le, require_connected);
}

Graph load_graph(const std::string& text)
{
    // Accept ';' as a line break so one-line literals work too.
    std::string t = text;
    std::replace(t.begin(), t.end(), ';', '\n');
    std::istringstream in(t);
    std::string line;
    int n = -1;
    std::vector<LabeledEdge> edges;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) {
            continue;
        }
        if (n < 0) {
            if (first.rfind("n=", 0) != 0) {
                throw GraphError("line " + std::to_string(lineno) + ": expected n=<int>");
            }
            try {
                size_t used = 0;
                n = std::stoi(first.substr(2), &used);
                if (used != first.size() - 2) {
                    throw std::invalid_argument("trailing");
                }
            } catch (const std::exception&) {
                throw GraphError("line " + std::to_string(lineno) + ": bad vertex count");
            }
            continue;
        }
        LabeledEdge e{};
        std::string vs, lab, extra;
        try {
            size_t used = 0;
            e.u = std::stoi(first, &used);
            if (used != first.size()) {
                throw std::invalid_argument("trailing");
            }
            if (!(ls >> vs)) {
                throw std::invalid_argument("missing v");
            }
            e.v = std::stoi(vs, &used);
            if (used != vs.size()) {
                throw std::invalid_argument("trailing");
            }
        } catch (const std::exception&) {
            throw GraphError("line " + std::to_string(lineno) + ": expected 'u v [label]'");
        }
        if (ls >> lab) {
            if (lab == "g0") {
                e.label = EdgeLabel::G0;
            } else if (lab == "g1") {
                e.label = EdgeLabel::G1;
            } else if (lab == "both") {
                e.label = EdgeLabel::Both;
            } else {
                throw GraphError("line " + std::to_string(lineno) + ": unknown label " + lab);
            }
        }
        if (ls >> extra) {
            throw GraphError("line " + std::to_string(lineno) + ": trailing tokens");
        }
        edges.push_back(e);
    }
    if (n < 0) {
        throw GraphError("missing n=<int> header");
    }
    return make_graph(n, edges);
}

std::string dump_graph(const Graph& g)
{
    std::ostringstream out;
    out << "n=" << g.n << "\n";
    // Re-emit in an order that reproduces every port assignment: an edge is
    // printed once both endpoints have reached it in their port order.
    std::vector<size_t> next(g.n, 0);
    size_t remaining = g.edge_count();
    while (remaining > 0) {
        bool progressed = false;
        for (int u = 0; u < g.n; ++u) {
            if (next[u] >= g.adj[u].size()) {
                continue;
            }
            int v = g.adj[u][next[u]];
            if (next[v] < g.adj[v].size() && g.adj[v][next[v]] == u) {
                const char* lab = g.labels[u][next[u]] == EdgeLabel::G0   ? "g0"
                                  : g.labels[u][next[u]] == EdgeLabel::G1 ? "g1"
                                                                          : "both";
                out << u << " " << v << " " << lab << "\n";
                ++next[u];
                ++next[v];
                --remaining;
                progressed = true;
            }
        }
        if (!progressed) {
            throw GraphError("port order is not realizable by an edge list");
        }
    }
    return out.str();
}

Graph path_graph(int n)
{
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) {
        e.emplace_back(i, i + 1);
    }
    return make_graph(n, e);
}

Graph cycle_graph(int n)
{
    if (n < 3) {
        throw GraphError("cycle needs n >= 3");
    }
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) {
        e.emplace_back(i, (i + 1) % n);
    }
    return make_graph(n, e);
}

Graph clique_graph(int n)
{
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            e.emplace_back(i, j);
        }
    }
    return make_graph(n, e);
}

Graph star_graph(int leaves)
{
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i <= leaves; ++i) {
        e.emplace_back(0, i);
    }
    return make_graph(leaves + 1, e);
}

Graph random_tree(int n, uint64_t seed)
{
    auto rng = make_rng(seed, 11);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin() + (n > 0 ? 1 : 0), order.end(), rng);
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> pick(0, i - 1);
        e.emplace_back(order[pick(rng)], order[i]);
    }
    std::shuffle(e.begin(), e.end(), rng);
    return make_graph(n, e);
}

Graph gnp_graph(int n, double p, uint64_t seed)
{
    if (n < 1 || p < 0.0 || p > 1.0) {
        throw GraphError("gnp needs n >= 1 and p in [0,1]");
    }
    if (n > 1 && p == 0.0) {
        throw GraphError("gnp with p = 0 is never connected");
    }
    for (uint64_t attempt = 0; attempt < 100000; ++attempt) {
        auto rng = make_rng(seed, 1000 + attempt);
        std::bernoulli_distribution coin(p);
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (coin(rng)) {
                    e.emplace_back(i, j);
                }
            }
        }
        Graph g = make_graph(n, e, false);
        if (is_connected(g)) {
            return g;
        }
    }
    throw GraphError("gnp: no connected sample; raise p");
}

Graph smallest_asymmetric()
{
    return make_graph(6, std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 4}, {3, 5}});
}

Graph rigid_companion()
{
    return make_graph(6, std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 4}, {3, 4}, {3, 5}});
}

Graph planted_clique(int n, int k, uint64_t seed, double p)
{
    if (k < 1 || k > n) {
        throw GraphError("planted_clique needs 1 <= K <= n");
    }
    for (uint64_t attempt = 0; attempt < 100000; ++attempt) {
        auto rng = make_rng(seed, 5000 + attempt);
        std::bernoulli_distribution coin(p);
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if ((i < k && j < k) || coin(rng)) {
                    e.emplace_back(i, j);
                }
            }
        }
        Graph g = make_graph(n, e, false);
        if (is_connected(g)) {
            return g;
        }
    }
    throw GraphError("planted_clique: no connected sample");
}

namespace {

int int_param(const Params& params, const std::string& key, int fallback, bool required)
{
    auto it = params.find(key);
    if (it == params.end()) {
        if (required) {
            throw GraphError("missing parameter " + key);
        }
        return fallback;
    }
    try {
        size_t used = 0;
        int v = std::stoi(it->second, &used);
        if (used != it->second.size()) {
            throw std::invalid_argument("trailing");
        }
        return v;
    } catch (const std::exception&) {
        throw GraphError("bad integer for " + key + ": " + it->second);
    }
}

double real_param(const Params& params, const std::string& key, double fallback)
{
    auto it = params.find(key);
    if (it == params.end()) {
        return fallback;
    }
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw GraphError("bad number for " + key + ": " + it->second);
    }
}

} // namespace

Graph generate_graph(const std::string& kind, const Params& params, uint64_t seed)
{
    if (kind == "smallest_asymmetric") {
        return smallest_asymmetric();
    }
    if (kind == "rigid_companion") {
        return rigid_companion();
    }
    int n = int_param(params, "n", 0, true);
    if (n < 1) {
        throw GraphError("n must be >= 1");
    }
    if (kind == "path") {
        return path_graph(n);
    }
    if (kind == "cycle") {
        return cycle_graph(n);
    }
    if (kind == "clique") {
        return clique_graph(n);
    }
    if (kind == "star") {
        return star_graph(n - 1);
    }
    if (kind == "tree") {
        return random_tree(n, seed);
    }
    if (kind == "gnp") {
        return gnp_graph(n, real_param(params, "p", 0.3), seed);
    }
    if (kind == "planted_clique") {
        return planted_clique(n, int_param(params, "K", 0, true), seed, real_param(params, "p", 0.3));
    }
    throw GraphError("unknown generator " + kind);
}

Graph generate_from_spec(const std::string& spec, uint64_t seed)
{
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::vector<std::string> args;
    if (colon != std::string::npos) {
        std::istringstream in(spec.substr(colon + 1));
        std::string a;
        while (std::getline(in, a, ',')) {
            args.push_back(a);
        }
    }
    Params p;
    if (!args.empty()) {
        p["n"] = args[0];
    }
    if (args.size() > 1) {
        p[kind == "gnp" ? "p" : "K"] = args[1];
    }
    if (args.size() > 2) {
        p["p"] = args[2];
    }
    return generate_graph(kind, p, seed);
}

Graph union_graph(const Graph& g0, const Graph& g1)
{
    if (g0.n != g1.n) {
        throw GraphError("union of graphs on different vertex sets");
    }
    std::vector<LabeledEdge> out;
    std::map<std::pair<int, int>, size_t> at;
    for (auto [u, v] : g0.edges()) {
        at[{u, v}] = out.size();
        out.push_back({u, v, EdgeLabel::G0});
    }
    for (auto [u, v] : g1.edges()) {
        auto it = at.find({u, v});
        if (it != at.end()) {
            out[it->second].label = EdgeLabel::Both;
        } else {
            out.push_back({u, v, EdgeLabel::G1});
        }
    }
    return make_graph(g0.n, out);
}

Graph permute_graph(const Graph& g, const std::vector<int>& pi)
{
    std::vector<LabeledEdge> e;
    for (int u = 0; u < g.n; ++u) {
        for (size_t p = 0; p < g.adj[u].size(); ++p) {
            int v = g.adj[u][p];
            if (u < v) {
                e.push_back({pi[u], pi[v], g.labels[u][p]});
            }
        }
    }
    return make_graph(g.n, e, false);
}

std::vector<uint64_t> adjacency_rows(int n, const std::vector<std::vector<int>>& adj)
{
    if (n > 64) {
        throw GraphError("adjacency_rows needs n <= 64");
    }
    std::vector<uint64_t> rows(n, 0);
    for (int u = 0; u < n; ++u) {
        for (int v : adj[u]) {
            rows[u] |= 1ULL << v;
        }
    }
    return rows;
}

std::vector<uint64_t> adjacency_rows(const Graph& g)
{
    return adjacency_rows(g.n, g.adj);
}

} // namespace dip
