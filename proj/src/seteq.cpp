#include "dip/seteq.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace dip {

unsigned SetEqConfig::proof_bits() const
{
    return tree_label_bits(n) + field.bits() + alpha_bits() + 2 * field.bits() + count_bits();
}

SetEqConfig seteq_config(int n, const Field& f)
{
    SetEqConfig c;
    c.n = n;
    c.field = f;
    uint64_t m = static_cast<uint64_t>(std::max(n, 2));
    c.alpha_range = m * m * m;
    return c;
}

SetEqConfig seteq_config_for(int n, const Big& element_bound)
{
    return seteq_config(n, identity_test_field(static_cast<uint64_t>(std::max(n, 2)), element_bound));
}

Bits draw_seteq_coins(const SetEqConfig& cfg, RandomTape& tape)
{
    Bits s;
    Bits a;
    tape.uniform(cfg.field.modulus(), &s);
    tape.uniform(Big(cfg.alpha_range), &a);
    s.append(a);
    return s;
}

bool read_seteq_coins(const SetEqConfig& cfg, BitReader& r, SetEqCoins& out)
{
    out.s = r.get_big(cfg.field.bits());
    out.alpha = r.get(cfg.alpha_bits());
    return !r.fail() && cfg.field.contains(out.s) && out.alpha < cfg.alpha_range;
}

void write_seteq_proof(const SetEqConfig& cfg, BitWriter& w, const SetEqProof& p)
{
    write_tree_label(w, cfg.n, p.tree);
    w.put_big(p.s, cfg.field.bits());
    w.put(p.alpha, cfg.alpha_bits());
    w.put_big(p.A, cfg.field.bits());
    w.put_big(p.B, cfg.field.bits());
    w.put(p.Q, cfg.count_bits());
}

SetEqProof read_seteq_proof(const SetEqConfig& cfg, BitReader& r)
{
    SetEqProof p;
    p.tree = read_tree_label(r, cfg.n);
    p.s = r.get_big(cfg.field.bits());
    p.alpha = r.get(cfg.alpha_bits());
    p.A = r.get_big(cfg.field.bits());
    p.B = r.get_big(cfg.field.bits());
    p.Q = r.get(cfg.count_bits());
    return p;
}

Big list_product(const Field& f, const Multiset& list, const Big& s)
{
    Big acc = f.from_u64(1);
    for (const auto& a : list) {
        acc = f.mul(acc, f.sub(f.reduce(a), s));
    }
    return acc;
}

bool seteq_check(const SetEqConfig& cfg, const NodeView& v, const SetEqCoins& mine, const SetEqProof& own,
                 const std::vector<SetEqProof>& nbr, const std::vector<char>& points_to_me, const Multiset& a,
                 const Multiset& b, std::vector<int>* children)
{
    const Field& f = cfg.field;
    if (!f.contains(own.s) || !f.contains(own.A) || !f.contains(own.B)) {
        return false;
    }
    std::vector<TreeLabel> labels(nbr.size());
    for (size_t p = 0; p < nbr.size(); ++p) {
        if (nbr[p].s != own.s || nbr[p].alpha != own.alpha) {
            return false;
        }
        labels[p] = nbr[p].tree;
    }
    std::vector<int> ch;
    if (!check_tree_label(v, own.tree, labels, points_to_me, &ch)) {
        return false;
    }
    if (own.alpha > mine.alpha) {
        return false;
    }
    bool winner = own.alpha == mine.alpha;
    if (winner && own.s != mine.s) {
        return false;
    }
    Big A = list_product(f, a, own.s);
    Big B = list_product(f, b, own.s);
    uint64_t Q = winner ? 1 : 0;
    for (int p : ch) {
        A = f.mul(A, nbr[p].A);
        B = f.mul(B, nbr[p].B);
        Q += nbr[p].Q;
    }
    if (A != own.A || B != own.B || Q != own.Q) {
        return false;
    }
    if (own.tree.parent_port < 0 && (own.Q != 1 || own.A != own.B)) {
        return false;
    }
    if (children) {
        *children = std::move(ch);
    }
    return true;
}

std::vector<SetEqCoins> parse_all_coins(const SetEqConfig& cfg, const std::vector<Bits>& msgs)
{
    std::vector<SetEqCoins> out(msgs.size());
    for (size_t u = 0; u < msgs.size(); ++u) {
        BitReader r(msgs[u]);
        read_seteq_coins(cfg, r, out[u]);
    }
    return out;
}

std::vector<SetEqProof> seteq_prove(const SetEqConfig& cfg, const Graph& g, const std::vector<SetEqCoins>& coins,
                                    const std::vector<Multiset>& a, const std::vector<Multiset>& b,
                                    SetEqStrategy strategy, int root)
{
    const Field& f = cfg.field;
    const int n = g.n;
    int win = 0;
    for (int u = 1; u < n; ++u) {
        if (coins[u].alpha < coins[win].alpha) {
            win = u;
        }
    }
    Big s = coins[win].s;
    if (strategy == SetEqStrategy::GrindWinner) {
        std::map<uint64_t, int> mult;
        for (int u = 0; u < n; ++u) {
            ++mult[coins[u].alpha];
        }
        for (int u = 0; u < n; ++u) {
            if (mult[coins[u].alpha] != 1) {
                continue;
            }
            Big pa = f.from_u64(1);
            Big pb = f.from_u64(1);
            for (int x = 0; x < n; ++x) {
                pa = f.mul(pa, list_product(f, a[x], coins[u].s));
                pb = f.mul(pb, list_product(f, b[x], coins[u].s));
            }
            if (pa == pb) {
                win = u;
                s = coins[u].s;
                break;
            }
        }
    } else if (strategy == SetEqStrategy::RootS) {
        for (int u = 0; u < n; ++u) {
            if (!a[u].empty()) {
                s = f.reduce(a[u][0]);
                break;
            }
        }
    }
    uint64_t alpha = coins[win].alpha;

    auto parent = bfs_parents(g, root);
    auto labels = labels_from_parents(g, parent);
    std::vector<SetEqProof> pr(n);
    for (int u = 0; u < n; ++u) {
        pr[u].tree = labels[u];
        pr[u].s = s;
        pr[u].alpha = alpha;
        pr[u].A = list_product(f, a[u], s);
        pr[u].B = list_product(f, b[u], s);
        pr[u].Q = coins[u].alpha == alpha ? 1 : 0;
    }
    for (int u : bottom_up_order(g, parent)) {
        int p = parent[u];
        if (p >= 0) {
            pr[p].A = f.mul(pr[p].A, pr[u].A);
            pr[p].B = f.mul(pr[p].B, pr[u].B);
            pr[p].Q += pr[u].Q;
        }
    }
    if (strategy == SetEqStrategy::ForgeRoot) {
        pr[root].B = pr[root].A;
    }
    return pr;
}

std::vector<std::string> seteq_strategy_names()
{
    return {"honest", "root-s", "grind-winner", "forge-root"};
}

SetEqStrategy seteq_strategy(const std::string& name)
{
    if (name == "honest") {
        return SetEqStrategy::Honest;
    }
    if (name == "root-s") {
        return SetEqStrategy::RootS;
    }
    if (name == "grind-winner") {
        return SetEqStrategy::GrindWinner;
    }
    if (name == "forge-root") {
        return SetEqStrategy::ForgeRoot;
    }
    throw std::invalid_argument("unknown set-equality strategy " + name);
}

TuplePacker& TuplePacker::add(const Big& v, unsigned width)
{
    if (bit_length(v) > width) {
        throw std::invalid_argument("tuple field wider than its slot");
    }
    v_ <<= width;
    v_ |= v;
    w_ += width;
    return *this;
}

namespace {

Big max_element_bound(const std::vector<Multiset>& a, const std::vector<Multiset>& b)
{
    Big m = 2;
    for (const auto* side : {&a, &b}) {
        for (const auto& l : *side) {
            for (const auto& x : l) {
                m = std::max(m, Big(x + 1));
            }
        }
    }
    return m;
}

// Neighbor proofs from {proof, flag} packets; false on any malformed one.
bool read_neighbor_proofs(const SetEqConfig& cfg, const NodeView& v, const Inbox& inbox,
                          std::vector<SetEqProof>& nbr, std::vector<char>& flags, size_t extra_bits = 0,
                          std::vector<uint64_t>* extra = nullptr)
{
    nbr.resize(v.deg());
    flags.assign(v.deg(), 0);
    if (extra) {
        extra->assign(v.deg(), 0);
    }
    for (int p = 0; p < v.deg(); ++p) {
        const Packet& pk = inbox[0][p];
        if (pk.size() != 2 || pk[1].size() != 1) {
            return false;
        }
        BitReader r(pk[0]);
        nbr[p] = read_seteq_proof(cfg, r);
        uint64_t x = r.get(static_cast<unsigned>(extra_bits));
        if (!r.done()) {
            return false;
        }
        if (extra) {
            (*extra)[p] = x;
        }
        flags[p] = pk[1][0];
    }
    return true;
}

} // namespace

SetEqualityProtocol::SetEqualityProtocol(std::vector<Multiset> a, std::vector<Multiset> b, SetEqConfig cfg)
    : a_(std::move(a)), b_(std::move(b)), cfg_(std::move(cfg))
{
    if (a_.size() != b_.size() || static_cast<int>(a_.size()) != cfg_.n) {
        throw std::invalid_argument("set-equality lists must cover every node");
    }
}

SetEqualityProtocol::SetEqualityProtocol(std::vector<Multiset> a, std::vector<Multiset> b)
    : SetEqualityProtocol(a, b, seteq_config_for(static_cast<int>(a.size()), max_element_bound(a, b)))
{
}

Bits SetEqualityProtocol::node_message(int, const NodeView&, RandomTape& tape) const
{
    return draw_seteq_coins(cfg_, tape);
}

std::vector<Packet> SetEqualityProtocol::node_exchange(int, const NodeView& v, NodeTranscript& tr,
                                                       const Inbox&) const
{
    BitReader r(tr.msgs[1]);
    TreeLabel l = read_tree_label(r, v.n);
    return tree_packets(v, l.parent_port, tr.msgs[1]);
}

bool SetEqualityProtocol::node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const
{
    SetEqCoins mine;
    BitReader cr(tr.msgs[0]);
    if (!read_seteq_coins(cfg_, cr, mine)) {
        return false;
    }
    BitReader r(tr.msgs[1]);
    SetEqProof own = read_seteq_proof(cfg_, r);
    if (!r.done()) {
        return false;
    }
    std::vector<SetEqProof> nbr;
    std::vector<char> flags;
    if (!read_neighbor_proofs(cfg_, v, inbox, nbr, flags)) {
        return false;
    }
    return seteq_check(cfg_, v, mine, own, nbr, flags, a_[v.id], b_[v.id]);
}

ProverFactory seteq_prover(const SetEqualityProtocol& p, SetEqStrategy strategy)
{
    SetEqConfig cfg = p.config();
    auto a = p.a();
    auto b = p.b();
    return lambda_prover([cfg, a, b, strategy](int, const ProverView& view, std::mt19937_64&) {
        auto coins = parse_all_coins(cfg, view.node_msgs[0]);
        auto pr = seteq_prove(cfg, view.graph, coins, a, b, strategy);
        std::vector<Bits> out;
        for (const auto& x : pr) {
            BitWriter w;
            write_seteq_proof(cfg, w, x);
            out.push_back(w.take());
        }
        return out;
    });
}

namespace {

std::vector<Multiset> singletons(const std::vector<uint64_t>& v, bool successor)
{
    std::vector<Multiset> out;
    uint64_t n = v.size();
    for (uint64_t x : v) {
        out.push_back({Big(successor ? (x % n) + 1 : x)});
    }
    return out;
}

} // namespace

PermutationProtocol::PermutationProtocol(const std::vector<uint64_t>& values)
    : SetEqualityProtocol(singletons(values, false), singletons(values, true),
                          seteq_config_for(static_cast<int>(values.size()), Big(values.size() + 1))),
      values_(values)
{
}

bool PermutationProtocol::node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const
{
    uint64_t a = values_[v.id];
    if (a < 1 || a > static_cast<uint64_t>(v.n)) {
        return false;
    }
    return SetEqualityProtocol::node_decide(v, tr, inbox);
}

DistinctnessProtocol::DistinctnessProtocol(std::vector<uint64_t> values, uint64_t value_bound)
    : values_(std::move(values)), vbits_(width_for(value_bound)),
      cfg_(seteq_config_for(static_cast<int>(values_.size()), Big(value_bound)))
{
    for (uint64_t x : values_) {
        if (x >= value_bound) {
            throw std::invalid_argument("distinctness value above its bound");
        }
    }
}

Bits DistinctnessProtocol::node_message(int, const NodeView&, RandomTape& tape) const
{
    return draw_seteq_coins(cfg_, tape);
}

std::vector<Packet> DistinctnessProtocol::node_exchange(int, const NodeView& v, NodeTranscript& tr,
                                                        const Inbox&) const
{
    BitReader r(tr.msgs[2]);
    TreeLabel l = read_tree_label(r, v.n);
    return tree_packets(v, l.parent_port, tr.msgs[2]);
}

bool DistinctnessProtocol::node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const
{
    if (v.n == 1) {
        return true;
    }
    BitReader yr(tr.msgs[0]);
    uint64_t y = yr.get(vbits_);
    if (!yr.done()) {
        return false;
    }
    SetEqCoins mine;
    BitReader cr(tr.msgs[1]);
    if (!read_seteq_coins(cfg_, cr, mine)) {
        return false;
    }
    BitReader r(tr.msgs[2]);
    SetEqProof own = read_seteq_proof(cfg_, r);
    uint64_t c = r.get(cfg_.count_bits());
    if (!r.done()) {
        return false;
    }
    std::vector<SetEqProof> nbr;
    std::vector<char> flags;
    std::vector<uint64_t> nc;
    if (!read_neighbor_proofs(cfg_, v, inbox, nbr, flags, cfg_.count_bits(), &nc)) {
        return false;
    }
    uint64_t a = values_[v.id];
    std::vector<int> children;
    if (!seteq_check(cfg_, v, mine, own, nbr, flags, {Big(a)}, {Big(y)}, &children)) {
        return false;
    }
    uint64_t sum = a >= y ? 1 : 0;
    for (int p : children) {
        sum += nc[p];
    }
    if (sum != c) {
        return false;
    }
    return own.tree.parent_port >= 0 || c == 1;
}

std::vector<std::string> distinct_strategy_names()
{
    return {"honest", "sorted-cycle", "collapse-y", "sum-forge"};
}

ProverFactory distinct_prover(const DistinctnessProtocol& p, DistinctStrategy strategy, SetEqStrategy inner)
{
    SetEqConfig cfg = p.config();
    auto values = p.values();
    unsigned vbits = p.value_bits();
    return lambda_prover([cfg, values, vbits, strategy, inner](int msg, const ProverView& view, std::mt19937_64&) {
        const int n = view.graph.n;
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return values[x] < values[y]; });
        std::vector<uint64_t> y(n);
        for (int i = 0; i < n; ++i) {
            y[order[i]] = values[order[(i + 1) % n]];
        }
        if (strategy == DistinctStrategy::CollapseY) {
            std::vector<uint64_t> distinct(values.begin(), values.end());
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            for (int u = 0; u < n; ++u) {
                auto it = std::upper_bound(distinct.begin(), distinct.end(), values[u]);
                y[u] = it == distinct.end() ? distinct.front() : *it;
            }
        }
        std::vector<Bits> out(n);
        if (msg == 0) {
            for (int u = 0; u < n; ++u) {
                BitWriter w;
                w.put(y[u], vbits);
                out[u] = w.take();
            }
            return out;
        }
        auto coins = parse_all_coins(cfg, view.node_msgs[1]);
        std::vector<Multiset> a(n);
        std::vector<Multiset> b(n);
        for (int u = 0; u < n; ++u) {
            a[u] = {Big(values[u])};
            b[u] = {Big(y[u])};
        }
        auto pr = seteq_prove(cfg, view.graph, coins, a, b, inner);
        auto parent = bfs_parents(view.graph, 0);
        std::vector<uint64_t> c(n);
        for (int u = 0; u < n; ++u) {
            c[u] = values[u] >= y[u] ? 1 : 0;
        }
        for (int u : bottom_up_order(view.graph, parent)) {
            if (parent[u] >= 0) {
                c[parent[u]] += c[u];
            }
        }
        if (strategy == DistinctStrategy::SumForge) {
            c[0] = 1;
        }
        for (int u = 0; u < n; ++u) {
            BitWriter w;
            write_seteq_proof(cfg, w, pr[u]);
            w.put(c[u], cfg.count_bits());
            out[u] = w.take();
        }
        return out;
    });
}

Multiset edge_list_of(const Graph& g, int u)
{
    Multiset out;
    for (int v : g.adj[u]) {
        if (u < v) {
            out.push_back(Big(static_cast<uint64_t>(u) * g.n + v));
        }
    }
    return out;
}

Multiset image_edge_list_of(const Graph& g, const std::vector<int>& pi, int u)
{
    Multiset out;
    for (int v : g.adj[u]) {
        if (u < v) {
            auto [x, y] = std::minmax(pi[u], pi[v]);
            out.push_back(Big(static_cast<uint64_t>(x) * g.n + y));
        }
    }
    return out;
}

namespace {

std::vector<Multiset> all_edges(const Graph& g, const std::vector<int>* pi)
{
    std::vector<Multiset> out(g.n);
    for (int u = 0; u < g.n; ++u) {
        out[u] = pi ? image_edge_list_of(g, *pi, u) : edge_list_of(g, u);
    }
    return out;
}

} // namespace

DSymLogProtocol::DSymLogProtocol(const Graph& g, std::vector<int> pi)
    : SetEqualityProtocol(all_edges(g, nullptr), all_edges(g, &pi),
                          seteq_config_for(g.n, Big(static_cast<uint64_t>(g.n) * g.n)))
{
}

} // namespace dip
