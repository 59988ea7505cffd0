#include "dip/fiatshamir.hpp"

#include <openssl/evp.h>

#include <optional>
#include <stdexcept>

namespace dip {

RandomOracle::RandomOracle(uint64_t key, unsigned lambda) : key_(key), lambda_(lambda)
{
    if (lambda < 1 || lambda > 256) {
        throw std::invalid_argument("oracle output width must be in 1..256");
    }
}

Bits RandomOracle::query(const std::vector<uint8_t>& input) const
{
    ++queries_;
    std::vector<uint8_t> msg(8);
    for (int i = 0; i < 8; ++i) {
        msg[i] = static_cast<uint8_t>(key_ >> (8 * i));
    }
    msg.insert(msg.end(), input.begin(), input.end());
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(msg.data(), msg.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    Bits out;
    for (unsigned i = 0; i < lambda_; ++i) {
        out.push_back((md[i / 8] >> (7 - i % 8)) & 1);
    }
    return out;
}

OracleInput::OracleInput(const char* domain)
{
    std::string d(domain);
    u64(d.size());
    data_.insert(data_.end(), d.begin(), d.end());
}

OracleInput& OracleInput::u64(uint64_t x)
{
    for (int i = 0; i < 8; ++i) {
        data_.push_back(static_cast<uint8_t>(x >> (8 * i)));
    }
    return *this;
}

OracleInput& OracleInput::bits(const Bits& b)
{
    u64(b.size());
    auto bytes = b.to_bytes();
    data_.insert(data_.end(), bytes.begin(), bytes.end());
    return *this;
}

OracleInput& OracleInput::bytes(const std::vector<uint8_t>& b)
{
    u64(b.size());
    data_.insert(data_.end(), b.begin(), b.end());
    return *this;
}

std::vector<uint8_t> neighborhood_bytes(int u, const std::vector<int>& nbr_ids, const std::vector<uint8_t>& input)
{
    OracleInput in("N");
    in.u64(static_cast<uint64_t>(u)).u64(nbr_ids.size());
    for (int x : nbr_ids) {
        in.u64(static_cast<uint64_t>(x));
    }
    in.bytes(input);
    return in.data();
}

Bits merkle_value(const RandomOracle& R, const std::vector<Bits>& child_y, const std::vector<uint8_t>& nu)
{
    OracleInput in("merkle");
    in.u64(child_y.size());
    for (const auto& y : child_y) {
        in.bits(y);
    }
    in.bytes(nu);
    return R.query(in.data());
}

GraphDigest merkle_graph_digest(const Graph& g, const std::vector<int>& parent, const RandomOracle& R)
{
    GraphDigest d;
    d.y.resize(g.n);
    auto kids = children_of(g, parent);
    for (int u : bottom_up_order(g, parent)) {
        std::vector<Bits> cy;
        for (int c : kids[u]) {
            cy.push_back(d.y[c]);
        }
        d.y[u] = merkle_value(R, cy, neighborhood_bytes(u, g.adj[u], g.inputs[u]));
        if (parent[u] < 0) {
            d.root = d.y[u];
        }
    }
    return d;
}

RandomTape fs_tape(const RandomOracle& R, const Bits& y_r, const std::vector<Bits>& transcript, int round, int node)
{
    const RandomOracle* oracle = &R;
    return RandomTape([oracle, y_r, transcript, round, node](uint64_t block) {
        OracleInput in("coin");
        in.bits(y_r).u64(transcript.size());
        for (const auto& m : transcript) {
            in.bits(m);
        }
        in.u64(static_cast<uint64_t>(round)).u64(static_cast<uint64_t>(node)).u64(block);
        return oracle->query(in.data());
    });
}

FiatShamirProtocol::FiatShamirProtocol(std::shared_ptr<const Protocol> inner, RandomOracle oracle)
    : inner_(std::move(inner)), oracle_(std::move(oracle))
{
    if (!inner_->public_coin()) {
        throw std::invalid_argument("Fiat-Shamir needs a public-coin protocol");
    }
}

Bits FiatShamirProtocol::encode(int n, const Label& l) const
{
    BitWriter w;
    write_tree_label(w, n, l.tree);
    w.bits(l.y).bits(l.y_root);
    for (const auto& m : l.prover) {
        w.put(m.size(), 32).bits(m);
    }
    return w.take();
}

bool FiatShamirProtocol::decode(int n, const Bits& b, Label& out) const
{
    BitReader r(b);
    out.tree = read_tree_label(r, n);
    out.y = r.bits(oracle_.lambda());
    out.y_root = r.bits(oracle_.lambda());
    out.prover.clear();
    for (Dir d : inner_->schedule()) {
        if (d == Dir::ProverToNodes) {
            size_t len = r.get(32);
            if (len > r.remaining()) {
                return false;
            }
            out.prover.push_back(r.bits(len));
        }
    }
    return r.done();
}

std::vector<Bits> FiatShamirProtocol::inner_transcript(const NodeView& v, const Label& l) const
{
    const auto sched = inner_->schedule();
    std::vector<Bits> msgs;
    size_t k = 0;
    for (size_t j = 0; j < sched.size(); ++j) {
        if (sched[j] == Dir::ProverToNodes) {
            msgs.push_back(l.prover[k++]);
        } else {
            RandomTape tape = fs_tape(oracle_, l.y_root, msgs, static_cast<int>(j), v.id);
            msgs.push_back(inner_->node_message(static_cast<int>(j), v, tape));
        }
    }
    return msgs;
}

namespace {

struct FsCache {
    bool ok = false;
    FiatShamirProtocol::Label label;
    NodeTranscript inner;
};

FsCache& fs_cache(const FiatShamirProtocol& p, const NodeView& v, NodeTranscript& tr)
{
    if (!tr.cache) {
        auto c = std::make_shared<FsCache>();
        c->ok = tr.msgs.size() == 1 && p.decode(v.n, tr.msgs[0], c->label);
        if (c->ok) {
            c->inner.msgs = p.inner_transcript(v, c->label);
        }
        tr.cache = c;
    }
    return *static_cast<FsCache*>(tr.cache.get());
}

Inbox inner_inbox(const Inbox& inbox)
{
    return Inbox(inbox.begin() + 1, inbox.end());
}

} // namespace

std::vector<Packet> FiatShamirProtocol::node_exchange(int step, const NodeView& v, NodeTranscript& tr,
                                                      const Inbox& inbox) const
{
    FsCache& c = fs_cache(*this, v, tr);
    if (!c.ok) {
        return std::vector<Packet>(v.deg());
    }
    if (step == 0) {
        BitWriter w;
        w.put(static_cast<uint64_t>(v.id), 32);
        write_tree_label(w, v.n, c.label.tree);
        w.bits(c.label.y).bits(c.label.y_root);
        return tree_packets(v, c.label.tree.parent_port, w.take());
    }
    return inner_->node_exchange(step - 1, v, c.inner, inner_inbox(inbox));
}

bool FiatShamirProtocol::node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const
{
    FsCache& c = fs_cache(*this, v, tr);
    if (!c.ok) {
        return false;
    }
    const unsigned lam = oracle_.lambda();
    std::vector<int> ids(v.deg());
    std::vector<TreeLabel> nl(v.deg());
    std::vector<Bits> ny(v.deg());
    std::vector<char> points(v.deg(), 0);
    for (int q = 0; q < v.deg(); ++q) {
        const Packet& pk = inbox[0][q];
        if (pk.size() != 2 || pk[1].size() != 1) {
            return false;
        }
        BitReader r(pk[0]);
        ids[q] = static_cast<int>(r.get(32));
        nl[q] = read_tree_label(r, v.n);
        ny[q] = r.bits(lam);
        Bits yr = r.bits(lam);
        if (!r.done() || !(yr == c.label.y_root)) {
            return false;
        }
        points[q] = pk[1][0];
    }
    std::vector<int> children;
    if (!check_tree_label(v, c.label.tree, nl, points, &children)) {
        return false;
    }
    std::vector<Bits> cy;
    for (int q : children) {
        cy.push_back(ny[q]);
    }
    if (!(merkle_value(oracle_, cy, neighborhood_bytes(v.id, ids, v.input)) == c.label.y)) {
        return false;
    }
    if (c.label.tree.parent_port < 0 && !(c.label.y == c.label.y_root)) {
        return false;
    }
    return inner_->node_decide(v, c.inner, inner_inbox(inbox));
}

FsSimulation fs_simulate(const FiatShamirProtocol& p, const Graph& g, const std::vector<int>& parent,
                         const RandomOracle& R, const ProverFactory& inner_prover, uint64_t seed)
{
    const Protocol& inner = p.inner();
    const auto sched = inner.schedule();
    FsSimulation s;
    s.parent = parent;
    s.digest = merkle_graph_digest(g, parent, R);
    s.node_msgs.assign(sched.size(), std::vector<Bits>(g.n));
    s.transcript.assign(g.n, {});
    auto prover = inner_prover(seed);
    for (size_t i = 0; i < sched.size(); ++i) {
        if (sched[i] == Dir::NodesToProver) {
            for (int u = 0; u < g.n; ++u) {
                NodeView view{u, g.n, g.adj[u], g.labels[u], g.inputs[u]};
                RandomTape tape = fs_tape(R, s.digest.root, s.transcript[u], static_cast<int>(i), u);
                Bits m = inner.node_message(static_cast<int>(i), view, tape);
                s.node_msgs[i][u] = m;
                s.transcript[u].push_back(std::move(m));
            }
        } else {
            ProverView pv{g, s.node_msgs};
            auto resp = prover->respond(static_cast<int>(i), pv);
            resp.resize(g.n);
            for (int u = 0; u < g.n; ++u) {
                s.transcript[u].push_back(std::move(resp[u]));
            }
        }
    }
    return s;
}

std::vector<Bits> fs_labels(const FiatShamirProtocol& p, const Graph& g, const FsSimulation& s)
{
    const auto sched = p.inner().schedule();
    auto tree = labels_from_parents(g, s.parent);
    std::vector<Bits> out(g.n);
    for (int u = 0; u < g.n; ++u) {
        FiatShamirProtocol::Label l;
        l.tree = tree[u];
        l.y = s.digest.y[u];
        l.y_root = s.digest.root;
        for (size_t i = 0; i < sched.size(); ++i) {
            if (sched[i] == Dir::ProverToNodes) {
                l.prover.push_back(s.transcript[u][i]);
            }
        }
        out[u] = p.encode(g.n, l);
    }
    return out;
}

bool inner_verdict(const Protocol& inner, const Graph& g, const std::vector<std::vector<Bits>>& transcript)
{
    const int n = g.n;
    std::vector<NodeView> views;
    views.reserve(n);
    for (int u = 0; u < n; ++u) {
        views.push_back(NodeView{u, n, g.adj[u], g.labels[u], g.inputs[u]});
    }
    std::vector<NodeTranscript> tr(n);
    for (int u = 0; u < n; ++u) {
        tr[u].msgs = transcript[u];
    }
    const int steps = inner.exchange_steps();
    std::vector<Inbox> inbox(n);
    for (int u = 0; u < n; ++u) {
        inbox[u].assign(steps, std::vector<Packet>(g.deg(u)));
    }
    for (int s = 0; s < steps; ++s) {
        std::vector<std::vector<Packet>> out(n);
        for (int u = 0; u < n; ++u) {
            out[u] = inner.node_exchange(s, views[u], tr[u], inbox[u]);
            out[u].resize(g.deg(u));
        }
        for (int u = 0; u < n; ++u) {
            for (int q = 0; q < g.deg(u); ++q) {
                int v = g.adj[u][q];
                inbox[v][s][g.port_of(v, u)] = std::move(out[u][q]);
            }
        }
    }
    for (int u = 0; u < n; ++u) {
        if (!inner.node_decide(views[u], tr[u], inbox[u])) {
            return false;
        }
    }
    return true;
}

ProverFactory fs_prover(std::shared_ptr<const FiatShamirProtocol> p, ProverFactory inner_prover, int root)
{
    return lambda_prover([p, inner_prover, root](int, const ProverView& view, std::mt19937_64& rng) {
        RandomOracle R(p->oracle().key(), p->oracle().lambda());
        auto sim = fs_simulate(*p, view.graph, bfs_parents(view.graph, root), R, inner_prover, rng());
        return fs_labels(*p, view.graph, sim);
    });
}

std::vector<int> random_spanning_tree(const Graph& g, std::mt19937_64& rng)
{
    std::vector<int> parent(g.n, -1);
    std::vector<char> seen(g.n, 0);
    int root = static_cast<int>(rng() % static_cast<uint64_t>(g.n));
    seen[root] = 1;
    std::vector<std::pair<int, int>> frontier;
    for (int v : g.adj[root]) {
        frontier.emplace_back(root, v);
    }
    while (!frontier.empty()) {
        size_t i = rng() % frontier.size();
        auto [u, v] = frontier[i];
        frontier[i] = frontier.back();
        frontier.pop_back();
        if (seen[v]) {
            continue;
        }
        seen[v] = 1;
        parent[v] = u;
        for (int w : g.adj[v]) {
            if (!seen[w]) {
                frontier.emplace_back(v, w);
            }
        }
    }
    return parent;
}

ProverFactory fs_grinding_prover(std::shared_ptr<const FiatShamirProtocol> p, ProverFactory inner_prover,
                                 uint64_t budget, std::shared_ptr<GrindResult> report)
{
    return lambda_prover([p, inner_prover, budget, report](int, const ProverView& view, std::mt19937_64& rng) {
        const Graph& g = view.graph;
        RandomOracle R(p->oracle().key(), p->oracle().lambda());
        GrindResult res;
        std::optional<FsSimulation> last;
        while (R.queries() < budget) {
            auto sim = fs_simulate(*p, g, random_spanning_tree(g, rng), R, inner_prover, rng());
            // An attempt that overruns the budget is discarded unused.
            if (R.queries() > budget) {
                break;
            }
            res.queries = R.queries();
            ++res.attempts;
            const bool ok = inner_verdict(p->inner(), g, sim.transcript);
            last = std::move(sim);
            if (ok) {
                res.success = true;
                break;
            }
        }
        if (report) {
            *report = res;
        }
        if (!last) {
            return std::vector<Bits>(g.n);
        }
        return fs_labels(*p, g, *last);
    });
}

} // namespace dip
