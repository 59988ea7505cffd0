#include "dip/o1tree.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace dip {

int o1_parent_port(const NodeView& v, uint8_t own, const std::vector<uint8_t>& nbr)
{
    const uint8_t want = static_cast<uint8_t>((own + 2) % 3);
    for (int q = 0; q < v.deg(); ++q) {
        if (nbr[q] == want) {
            return q;
        }
    }
    return -1;
}

std::vector<int> o1_parents(const Graph& g, const std::vector<uint8_t>& d3)
{
    std::vector<int> parent(g.n, -1);
    for (int u = 0; u < g.n; ++u) {
        const uint8_t want = static_cast<uint8_t>((d3[u] + 2) % 3);
        for (int v : g.adj[u]) {
            if (d3[v] == want) {
                parent[u] = v;
                break;
            }
        }
    }
    return parent;
}

namespace {

std::vector<uint8_t> bfs_d3(const Graph& g, const std::vector<int>& sources, std::vector<uint8_t> d3 = {})
{
    std::vector<char> seen(g.n, 0);
    std::deque<int> q;
    if (d3.empty()) {
        d3.assign(g.n, 0);
    }
    for (int s : sources) {
        seen[s] = 1;
        q.push_back(s);
    }
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int v : g.adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                d3[v] = static_cast<uint8_t>((d3[u] + 1) % 3);
                q.push_back(v);
            }
        }
    }
    return d3;
}

// A simple cycle whose length is a positive multiple of 3, by bounded DFS.
std::vector<int> cycle_mod3(const Graph& g)
{
    std::vector<int> path;
    std::vector<char> on(g.n, 0);
    size_t budget = 2000000;
    std::function<bool(int, int)> dfs = [&](int start, int u) -> bool {
        if (budget-- == 0) {
            return false;
        }
        for (int v : g.adj[u]) {
            if (v == start && path.size() >= 3 && path.size() % 3 == 0) {
                return true;
            }
            if (v > start && !on[v]) {
                on[v] = 1;
                path.push_back(v);
                if (dfs(start, v)) {
                    return true;
                }
                path.pop_back();
                on[v] = 0;
            }
        }
        return false;
    };
    for (int s = 0; s < g.n; ++s) {
        path = {s};
        on.assign(g.n, 0);
        on[s] = 1;
        if (dfs(s, s)) {
            return path;
        }
    }
    return {};
}

} // namespace

std::vector<uint8_t> honest_d3(const Graph& g, int root)
{
    return bfs_d3(g, {root});
}

std::vector<O1Reply> o1_best_reply(const Graph& g, const std::vector<uint8_t>& d3, const std::vector<uint64_t>& b)
{
    auto parent = o1_parents(g, d3);
    std::vector<O1Reply> out(g.n);
    std::vector<char> done(g.n, 0);
    uint64_t br = 0;
    bool have_root = false;
    for (int u = 0; u < g.n; ++u) {
        if (parent[u] < 0) {
            out[u].s = b[u];
            done[u] = 1;
            if (!have_root) {
                br = b[u];
                have_root = true;
            }
        }
    }
    // Walk up to a done node or around a cycle, then assign downwards.
    std::vector<char> visiting(g.n, 0);
    for (int u = 0; u < g.n; ++u) {
        if (done[u]) {
            continue;
        }
        std::vector<int> chain;
        int x = u;
        while (!done[x] && !visiting[x]) {
            visiting[x] = 1;
            chain.push_back(x);
            x = parent[x];
        }
        if (!done[x]) {
            // x is on a fresh cycle: start it at s = b.
            out[x].s = b[x];
            done[x] = 1;
        }
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            if (!done[*it]) {
                out[*it].s = out[parent[*it]].s ^ b[*it];
                done[*it] = 1;
            }
        }
    }
    for (auto& r : out) {
        r.br = br;
    }
    return out;
}

O1TreeProtocol::O1TreeProtocol(int t) : t_(t)
{
    if (t < 1 || t > 64) {
        throw std::invalid_argument("o1-tree repetitions must be in 1..64");
    }
}

Bits O1TreeProtocol::node_message(int, const NodeView&, RandomTape& tape) const
{
    return tape.take(static_cast<size_t>(t_));
}

Bits O1TreeProtocol::encode_labels(uint8_t d3, uint64_t extra) const
{
    BitWriter w;
    w.put(d3, 2);
    if (extra_bits() > 0) {
        w.put(extra, extra_bits());
    }
    return w.take();
}

Bits O1TreeProtocol::encode_reply(const O1Reply& r) const
{
    BitWriter w;
    w.put(r.s, static_cast<unsigned>(t_));
    w.put(r.br, static_cast<unsigned>(t_));
    return w.take();
}

std::vector<uint8_t> O1TreeProtocol::read_d3(const std::vector<Bits>& msgs) const
{
    std::vector<uint8_t> d3;
    for (const auto& m : msgs) {
        BitReader r(m);
        uint64_t d = r.get(2);
        r.get(extra_bits());
        d3.push_back(r.done() ? static_cast<uint8_t>(d) : 3);
    }
    return d3;
}

namespace {

struct O1Parsed {
    uint8_t d3 = 0;
    uint64_t extra = 0;
    uint64_t b = 0;
    O1Reply reply;
};

bool parse_o1(const O1TreeProtocol& p, const NodeTranscript& tr, O1Parsed& out)
{
    if (tr.msgs.size() != 3) {
        return false;
    }
    const unsigned t = static_cast<unsigned>(p.reps());
    BitReader m0(tr.msgs[0]);
    out.d3 = static_cast<uint8_t>(m0.get(2));
    out.extra = p.extra_bits() > 0 ? m0.get(p.extra_bits()) : 0;
    BitReader m1(tr.msgs[1]);
    out.b = m1.get(t);
    BitReader m2(tr.msgs[2]);
    out.reply.s = m2.get(t);
    out.reply.br = m2.get(t);
    return m0.done() && m1.done() && m2.done() && out.d3 < 3;
}

} // namespace

std::vector<Packet> O1TreeProtocol::node_exchange(int step, const NodeView& v, NodeTranscript& tr,
                                                  const Inbox& inbox) const
{
    O1Parsed me;
    const bool ok = parse_o1(*this, tr, me);
    if (step == 1) {
        std::vector<uint8_t> nd3(v.deg(), 3);
        for (int q = 0; q < v.deg(); ++q) {
            if (inbox[0][q].size() == 1) {
                BitReader r(inbox[0][q][0]);
                nd3[q] = static_cast<uint8_t>(r.get(2));
            }
        }
        int pp = ok ? o1_parent_port(v, me.d3, nd3) : -1;
        std::vector<Packet> out(v.deg());
        for (int q = 0; q < v.deg(); ++q) {
            Bits f;
            f.push_back(q == pp);
            out[q] = Packet{f};
        }
        return out;
    }
    Bits payload;
    if (ok) {
        BitWriter w;
        w.put(me.d3, 2);
        if (extra_bits() > 0) {
            w.put(me.extra, extra_bits());
        }
        w.put(me.reply.s, static_cast<unsigned>(t_));
        w.put(me.reply.br, static_cast<unsigned>(t_));
        payload = w.take();
    }
    return std::vector<Packet>(v.deg(), Packet{payload});
}

bool O1TreeProtocol::node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const
{
    O1Parsed me;
    if (!parse_o1(*this, tr, me)) {
        return false;
    }
    const unsigned t = static_cast<unsigned>(t_);
    std::vector<uint8_t> nd3(v.deg());
    std::vector<uint64_t> nextra(v.deg()), ns(v.deg()), nbr(v.deg());
    for (int q = 0; q < v.deg(); ++q) {
        if (inbox[0][q].size() != 1) {
            return false;
        }
        BitReader r(inbox[0][q][0]);
        nd3[q] = static_cast<uint8_t>(r.get(2));
        nextra[q] = extra_bits() > 0 ? r.get(extra_bits()) : 0;
        ns[q] = r.get(t);
        nbr[q] = r.get(t);
        if (!r.done() || nd3[q] > 2) {
            return false;
        }
        if (nbr[q] != me.reply.br) {
            return false;
        }
    }
    std::vector<char> is_child(v.deg(), 0);
    for (int q = 0; q < v.deg(); ++q) {
        if (inbox[1][q].size() != 1 || inbox[1][q][0].size() != 1) {
            return false;
        }
        is_child[q] = inbox[1][q][0][0];
    }
    int pp = o1_parent_port(v, me.d3, nd3);
    bool root = pp < 0;
    if (!root && is_child[pp]) {
        return false;
    }
    if (root) {
        if (me.reply.s != me.b || me.reply.br != me.b) {
            return false;
        }
    } else if (me.reply.s != (ns[pp] ^ me.b)) {
        return false;
    }
    return extra_check(v, me.extra, nextra, pp, is_child);
}

bool O1TreeProtocol::extra_check(const NodeView&, uint64_t, const std::vector<uint64_t>&, int,
                                 const std::vector<char>&) const
{
    return true;
}

std::vector<std::string> o1_strategy_names()
{
    return {"honest", "all-equal", "two-root", "cycle-forge"};
}

O1Strategy o1_strategy(const std::string& name)
{
    if (name == "honest") {
        return O1Strategy::Honest;
    }
    if (name == "all-equal") {
        return O1Strategy::AllEqual;
    }
    if (name == "two-root") {
        return O1Strategy::TwoRoot;
    }
    if (name == "cycle-forge") {
        return O1Strategy::CycleForge;
    }
    throw std::invalid_argument("unknown o1-tree strategy " + name);
}

std::vector<uint8_t> o1_forged_d3(const Graph& g, O1Strategy s, int root)
{
    switch (s) {
    case O1Strategy::Honest: return honest_d3(g, root);
    case O1Strategy::AllEqual: return std::vector<uint8_t>(g.n, 0);
    case O1Strategy::TwoRoot: {
        // The last node BFS reaches is a farthest one.
        std::vector<int> order;
        std::deque<int> q{root};
        std::vector<char> seen(g.n, 0);
        seen[root] = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            order.push_back(u);
            for (int v : g.adj[u]) {
                if (!seen[v]) {
                    seen[v] = 1;
                    q.push_back(v);
                }
            }
        }
        if (g.n < 2) {
            throw GraphError("two-root forgery needs two nodes");
        }
        return bfs_d3(g, {root, order.back()});
    }
    case O1Strategy::CycleForge: {
        auto cyc = cycle_mod3(g);
        if (cyc.empty()) {
            throw GraphError("no cycle of length divisible by 3");
        }
        std::vector<uint8_t> d3(g.n, 0);
        for (size_t i = 0; i < cyc.size(); ++i) {
            d3[cyc[i]] = static_cast<uint8_t>(i % 3);
        }
        return bfs_d3(g, cyc, d3);
    }
    }
    return {};
}

ProverFactory o1_labels_prover(const O1TreeProtocol& p, std::vector<uint8_t> d3, std::vector<uint64_t> extra)
{
    const O1TreeProtocol* proto = &p;
    if (extra.empty()) {
        extra.assign(d3.size(), 0);
    }
    return lambda_prover([proto, d3, extra](int msg, const ProverView& view, std::mt19937_64&) {
        std::vector<Bits> out;
        const int n = view.graph.n;
        if (msg == 0) {
            for (int u = 0; u < n; ++u) {
                out.push_back(proto->encode_labels(d3[u], extra[u]));
            }
            return out;
        }
        std::vector<uint64_t> b(n);
        for (int u = 0; u < n; ++u) {
            BitReader r(view.node_msgs[1][u]);
            b[u] = r.get(static_cast<unsigned>(proto->reps()));
        }
        for (const auto& r : o1_best_reply(view.graph, d3, b)) {
            out.push_back(proto->encode_reply(r));
        }
        return out;
    });
}

ProverFactory o1_prover(const O1TreeProtocol& p, const Graph& g, O1Strategy s, int root)
{
    return o1_labels_prover(p, o1_forged_d3(g, s, root));
}

size_t DeliveryPlan::max_physical() const
{
    return physical_bits.empty() ? 0 : *std::max_element(physical_bits.begin(), physical_bits.end());
}

DeliveryPlan degree_redistribution(const Graph& g, const std::vector<int>& parent,
                                   const std::vector<size_t>& payload_bits, size_t beta)
{
    if (beta == 0) {
        throw std::invalid_argument("beta must be positive");
    }
    DeliveryPlan plan;
    plan.beta = beta;
    plan.carries.assign(g.n, {});
    plan.physical_bits.assign(g.n, 0);
    auto children = children_of(g, parent);
    for (int u = 0; u < g.n; ++u) {
        if (payload_bits[u] > static_cast<size_t>(g.deg(u)) * beta) {
            throw std::invalid_argument("payload exceeds deg(u) * beta");
        }
        size_t frags = (payload_bits[u] + beta - 1) / beta;
        for (size_t i = 0; i < frags; ++i) {
            size_t len = std::min(beta, payload_bits[u] - i * beta);
            int holder = i < children[u].size() ? children[u][i] : u;
            plan.carries[holder].emplace_back(u, static_cast<int>(i));
            plan.physical_bits[holder] += len;
        }
    }
    return plan;
}

} // namespace dip
