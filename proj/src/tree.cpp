#include "dip/tree.hpp"

#include <algorithm>
#include <deque>

namespace dip {

unsigned tree_label_bits(int n)
{
    return 3 * width_for(static_cast<uint64_t>(n));
}

void write_tree_label(BitWriter& w, int n, const TreeLabel& l)
{
    unsigned k = width_for(static_cast<uint64_t>(n));
    w.put(static_cast<uint64_t>(l.parent_port + 1), k);
    w.put(l.dist, k);
    w.put(l.root_id, k);
}

TreeLabel read_tree_label(BitReader& r, int n)
{
    unsigned k = width_for(static_cast<uint64_t>(n));
    TreeLabel l;
    l.parent_port = static_cast<int>(r.get(k)) - 1;
    l.dist = r.get(k);
    l.root_id = r.get(k);
    return l;
}

std::vector<int> bfs_parents(const Graph& g, int root)
{
    std::vector<int> parent(g.n, -2);
    std::deque<int> q{root};
    parent[root] = -1;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int v : g.adj[u]) {
            if (parent[v] == -2) {
                parent[v] = u;
                q.push_back(v);
            }
        }
    }
    return parent;
}

std::vector<TreeLabel> labels_from_parents(const Graph& g, const std::vector<int>& parent)
{
    std::vector<TreeLabel> l(g.n);
    std::vector<int> order = bottom_up_order(g, parent);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int u = *it;
        if (parent[u] < 0) {
            l[u] = TreeLabel{-1, 0, static_cast<uint64_t>(u)};
        } else {
            int p = parent[u];
            l[u] = TreeLabel{g.port_of(u, p), l[p].dist + 1, l[p].root_id};
        }
    }
    return l;
}

std::vector<TreeLabel> honest_tree_labels(const Graph& g, int root)
{
    return labels_from_parents(g, bfs_parents(g, root));
}

std::vector<int> parents_from_labels(const Graph& g, const std::vector<TreeLabel>& labels)
{
    std::vector<int> parent(g.n, -1);
    for (int u = 0; u < g.n; ++u) {
        int p = labels[u].parent_port;
        if (p >= 0 && p < g.deg(u)) {
            parent[u] = g.adj[u][p];
        }
    }
    return parent;
}

bool is_spanning_tree(const Graph& g, const std::vector<int>& parent)
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
    // Every node must reach the root within n steps.
    for (int u = 0; u < g.n; ++u) {
        int x = u;
        int steps = 0;
        while (parent[x] >= 0 && steps <= g.n) {
            x = parent[x];
            ++steps;
        }
        if (parent[x] >= 0) {
            return false;
        }
    }
    return true;
}

std::vector<std::vector<int>> children_of(const Graph& g, const std::vector<int>& parent)
{
    std::vector<std::vector<int>> ch(g.n);
    for (int u = 0; u < g.n; ++u) {
        for (int v : g.adj[u]) {
            if (parent[v] == u) {
                ch[u].push_back(v);
            }
        }
    }
    return ch;
}

std::vector<int> bottom_up_order(const Graph& g, const std::vector<int>& parent)
{
    auto ch = children_of(g, parent);
    std::vector<int> order;
    order.reserve(g.n);
    for (int r = 0; r < g.n; ++r) {
        if (parent[r] >= 0) {
            continue;
        }
        std::vector<int> st{r};
        while (!st.empty()) {
            int u = st.back();
            st.pop_back();
            order.push_back(u);
            for (int c : ch[u]) {
                st.push_back(c);
            }
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

bool check_tree_label(const NodeView& v, const TreeLabel& own, const std::vector<TreeLabel>& nbr,
                      const std::vector<char>& points_to_me, std::vector<int>* children)
{
    if (own.parent_port < 0) {
        if (own.dist != 0 || own.root_id != static_cast<uint64_t>(v.id)) {
            return false;
        }
    } else {
        if (own.parent_port >= v.deg() || points_to_me[own.parent_port]) {
            return false;
        }
        if (own.dist != nbr[own.parent_port].dist + 1) {
            return false;
        }
    }
    for (int p = 0; p < v.deg(); ++p) {
        if (nbr[p].root_id != own.root_id) {
            return false;
        }
    }
    if (children) {
        children->clear();
        for (int p = 0; p < v.deg(); ++p) {
            if (points_to_me[p]) {
                children->push_back(p);
            }
        }
    }
    return true;
}

std::vector<Packet> tree_packets(const NodeView& v, int parent_port, const Bits& proof)
{
    std::vector<Packet> out(v.deg());
    for (int p = 0; p < v.deg(); ++p) {
        Bits flag;
        flag.push_back(p == parent_port);
        out[p] = Packet{proof, flag};
    }
    return out;
}

namespace {

// Parses a neighbor packet of the form {proof, parent-flag}.
bool packet_flag(const Packet& pk)
{
    return pk.size() >= 2 && pk[1].size() == 1 && pk[1][0];
}

} // namespace

std::vector<Packet> TreeLabelingProtocol::node_exchange(int, const NodeView& v, NodeTranscript& tr,
                                                        const Inbox&) const
{
    BitReader r(tr.msgs[0]);
    TreeLabel l = read_tree_label(r, v.n);
    return tree_packets(v, l.parent_port, tr.msgs[0]);
}

bool TreeLabelingProtocol::node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const
{
    BitReader r(tr.msgs[0]);
    TreeLabel own = read_tree_label(r, v.n);
    if (!r.done()) {
        return false;
    }
    std::vector<TreeLabel> nbr(v.deg());
    std::vector<char> flags(v.deg(), 0);
    for (int p = 0; p < v.deg(); ++p) {
        const Packet& pk = inbox[0][p];
        if (pk.empty()) {
            return false;
        }
        BitReader nr(pk[0]);
        nbr[p] = read_tree_label(nr, v.n);
        if (!nr.done()) {
            return false;
        }
        flags[p] = packet_flag(pk);
    }
    return check_tree_label(v, own, nbr, flags, nullptr);
}

ProverFactory tree_label_prover(const std::vector<TreeLabel>& labels)
{
    int n = static_cast<int>(labels.size());
    std::vector<Bits> msgs;
    for (const auto& l : labels) {
        BitWriter w;
        write_tree_label(w, n, l);
        msgs.push_back(w.take());
    }
    return fixed_prover(msgs);
}

ProverFactory honest_tree_prover(const Graph& g, int root)
{
    return tree_label_prover(honest_tree_labels(g, root));
}

std::vector<TreeLabel> cycle_forgery(const Graph& g)
{
    // Start from the honest labels and turn the root's first edge into a
    // two-node parent cycle; the root now claims distance d(child)+1.
    auto l = honest_tree_labels(g, 0);
    if (g.n < 2) {
        return l;
    }
    int c = g.adj[0][0];
    l[0].parent_port = 0;
    l[0].dist = l[c].dist + 1;
    return l;
}

std::vector<TreeLabel> two_root_forgery(const Graph& g)
{
    if (g.n < 2) {
        return honest_tree_labels(g, 0);
    }
    // Multi-source BFS from nodes 0 and n-1; each side is a correct tree
    // labeled with its own root ID.
    int a = 0;
    int b = g.n - 1;
    std::vector<int> parent(g.n, -2);
    std::deque<int> q{a, b};
    parent[a] = -1;
    parent[b] = -1;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int v : g.adj[u]) {
            if (parent[v] == -2) {
                parent[v] = u;
                q.push_back(v);
            }
        }
    }
    return labels_from_parents(g, parent);
}

AggregateProtocol::AggregateProtocol(std::vector<Big> values, AggOp op, Field field, std::optional<Big> target)
    : values_(std::move(values)), op_(op), field_(std::move(field)), target_(std::move(target))
{
    if (op_ == AggOp::Product) {
        width_ = field_.bits();
        for (auto& x : values_) {
            x = field_.reduce(x);
        }
    } else {
        unsigned vb = 1;
        for (const auto& x : values_) {
            vb = std::max(vb, bit_length(x));
        }
        width_ = vb + width_for(static_cast<uint64_t>(values_.size()) + 1);
    }
}

Big AggregateProtocol::combine(const Big& a, const Big& b) const
{
    return op_ == AggOp::Sum ? Big(a + b) : field_.mul(a, b);
}

Big AggregateProtocol::identity() const
{
    return op_ == AggOp::Sum ? Big(0) : field_.from_u64(1);
}

Bits AggregateProtocol::encode(int n, const TreeLabel& l, const Big& x) const
{
    BitWriter w;
    write_tree_label(w, n, l);
    w.put_big(x, width_);
    return w.take();
}

std::vector<Big> AggregateProtocol::partials(const Graph& g, const std::vector<int>& parent) const
{
    std::vector<Big> x(values_.begin(), values_.end());
    for (int u : bottom_up_order(g, parent)) {
        if (parent[u] >= 0) {
            x[parent[u]] = combine(x[parent[u]], x[u]);
        }
    }
    return x;
}

std::vector<Packet> AggregateProtocol::node_exchange(int, const NodeView& v, NodeTranscript& tr, const Inbox&) const
{
    BitReader r(tr.msgs[0]);
    TreeLabel l = read_tree_label(r, v.n);
    return tree_packets(v, l.parent_port, tr.msgs[0]);
}

bool AggregateProtocol::node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const
{
    BitReader r(tr.msgs[0]);
    TreeLabel own = read_tree_label(r, v.n);
    Big x = r.get_big(width_);
    if (!r.done()) {
        return false;
    }
    std::vector<TreeLabel> nbr(v.deg());
    std::vector<Big> nx(v.deg());
    std::vector<char> flags(v.deg(), 0);
    for (int p = 0; p < v.deg(); ++p) {
        const Packet& pk = inbox[0][p];
        if (pk.empty()) {
            return false;
        }
        BitReader nr(pk[0]);
        nbr[p] = read_tree_label(nr, v.n);
        nx[p] = nr.get_big(width_);
        if (!nr.done()) {
            return false;
        }
        flags[p] = packet_flag(pk);
    }
    std::vector<int> children;
    if (!check_tree_label(v, own, nbr, flags, &children)) {
        return false;
    }
    Big acc = values_[v.id];
    for (int p : children) {
        acc = combine(acc, nx[p]);
    }
    if (acc != x) {
        return false;
    }
    if (own.parent_port < 0 && target_ && x != *target_) {
        return false;
    }
    return true;
}

Big aggregate_direct(const std::vector<Big>& values, AggOp op, const Field& f)
{
    Big acc = op == AggOp::Sum ? Big(0) : f.from_u64(1);
    for (const auto& x : values) {
        acc = op == AggOp::Sum ? Big(acc + x) : f.mul(acc, f.reduce(x));
    }
    return acc;
}

namespace {

std::vector<Bits> aggregate_messages(const AggregateProtocol& p, const Graph& g, int root, int victim,
                                     const Big& delta)
{
    auto parent = bfs_parents(g, root);
    auto labels = labels_from_parents(g, parent);
    auto x = p.partials(g, parent);
    if (victim >= 0) {
        x[victim] = p.combine(x[victim], delta);
    }
    std::vector<Bits> msgs;
    for (int u = 0; u < g.n; ++u) {
        msgs.push_back(p.encode(g.n, labels[u], x[u]));
    }
    return msgs;
}

} // namespace

ProverFactory honest_aggregate_prover(const AggregateProtocol& p, const Graph& g, int root)
{
    auto msgs = aggregate_messages(p, g, root, -1, 0);
    return fixed_prover(msgs);
}

ProverFactory inflating_aggregate_prover(const AggregateProtocol& p, const Graph& g, int victim, const Big& delta)
{
    auto msgs = aggregate_messages(p, g, 0, victim, delta);
    return fixed_prover(msgs);
}

} // namespace dip
