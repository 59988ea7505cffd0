#include "dip/lde.hpp"

#include <stdexcept>

namespace dip {

uint64_t LdeParams::positions() const
{
    uint64_t s = 1;
    for (unsigned j = 0; j < m; ++j) {
        s *= h;
    }
    return s;
}

LdeParams default_lde_params(uint64_t positions, int n)
{
    LdeParams p;
    unsigned lg = std::max(1u, ceil_log2(std::max<uint64_t>(positions, 2)));
    p.h = 1;
    while (p.h < lg) {
        p.h <<= 1;
    }
    p.h = std::max<uint64_t>(p.h, 2);
    p.m = 1;
    while (p.positions() < positions) {
        ++p.m;
    }
    uint64_t bound = p.h * p.h * p.m * static_cast<uint64_t>(std::max(n, 1));
    p.field = Field(next_prime(Big(bound + 1)));
    return p;
}

std::vector<uint64_t> grid_point(const LdeParams& p, uint64_t index)
{
    std::vector<uint64_t> x(p.m);
    for (unsigned j = 0; j < p.m; ++j) {
        x[j] = index % p.h;
        index /= p.h;
    }
    return x;
}

Big lagrange_basis(const LdeParams& p, uint64_t x, const Big& z)
{
    const Field& f = p.field;
    Big num = f.from_u64(1);
    Big den = f.from_u64(1);
    for (uint64_t y = 0; y < p.h; ++y) {
        if (y == x) {
            continue;
        }
        num = f.mul(num, f.sub(f.reduce(z), f.from_u64(y)));
        den = f.mul(den, f.sub(f.from_u64(x), f.from_u64(y)));
    }
    return f.mul(num, f.inv(den));
}

Big tau_hat(const LdeParams& p, const std::vector<uint64_t>& x, const std::vector<Big>& z)
{
    Big acc = p.field.from_u64(1);
    for (unsigned j = 0; j < p.m; ++j) {
        acc = p.field.mul(acc, lagrange_basis(p, x[j], z[j]));
    }
    return acc;
}

Big lde_eval(const LdeParams& p, const std::vector<Big>& phi, const std::vector<Big>& z)
{
    Big acc = 0;
    for (uint64_t i = 0; i < phi.size(); ++i) {
        if (phi[i] == 0) {
            continue;
        }
        acc = p.field.add(acc, p.field.mul(tau_hat(p, grid_point(p, i), z), p.field.reduce(phi[i])));
    }
    return acc;
}

LdeProtocol::LdeProtocol(LdeParams params, std::vector<Big> phi, int n)
    : params_(std::move(params)), phi_(std::move(phi)), n_(n)
{
    if (phi_.size() > params_.positions()) {
        throw std::invalid_argument("more inputs than grid positions");
    }
    phi_.resize(params_.positions(), 0);
}

Big LdeProtocol::local_share(int u, const std::vector<Big>& z) const
{
    Big acc = 0;
    for (uint64_t i = static_cast<uint64_t>(u); i < phi_.size(); i += static_cast<uint64_t>(n_)) {
        if (phi_[i] != 0) {
            acc = params_.field.add(acc, params_.field.mul(tau_hat(params_, grid_point(params_, i), z), phi_[i]));
        }
    }
    return acc;
}

Bits LdeProtocol::encode(int n, const TreeLabel& l, const std::vector<Big>& z, const Big& v, const Big& x) const
{
    BitWriter w;
    write_tree_label(w, n, l);
    unsigned fb = params_.field.bits();
    for (const auto& zj : z) {
        w.put_big(zj, fb);
    }
    w.put_big(v, fb);
    w.put_big(x, fb);
    return w.take();
}

namespace {

struct LdeMsg {
    TreeLabel label;
    std::vector<Big> z;
    Big v;
    Big x;
};

bool parse_lde(const LdeParams& p, int n, const Bits& b, LdeMsg& out)
{
    BitReader r(b);
    out.label = read_tree_label(r, n);
    unsigned fb = p.field.bits();
    out.z.resize(p.m);
    for (auto& zj : out.z) {
        zj = r.get_big(fb);
    }
    out.v = r.get_big(fb);
    out.x = r.get_big(fb);
    if (!r.done()) {
        return false;
    }
    for (const auto& zj : out.z) {
        if (!p.field.contains(zj)) {
            return false;
        }
    }
    return p.field.contains(out.v) && p.field.contains(out.x);
}

} // namespace

Big LdeProtocol::claimed_value(int n, const Bits& msg) const
{
    LdeMsg m;
    parse_lde(params_, n, msg, m);
    return m.v;
}

std::vector<Packet> LdeProtocol::node_exchange(int, const NodeView& v, NodeTranscript& tr, const Inbox&) const
{
    BitReader r(tr.msgs[0]);
    TreeLabel l = read_tree_label(r, v.n);
    return tree_packets(v, l.parent_port, tr.msgs[0]);
}

bool LdeProtocol::node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const
{
    LdeMsg own;
    if (!parse_lde(params_, v.n, tr.msgs[0], own)) {
        return false;
    }
    std::vector<TreeLabel> nbr(v.deg());
    std::vector<Big> nx(v.deg());
    std::vector<char> flags(v.deg(), 0);
    for (int p = 0; p < v.deg(); ++p) {
        const Packet& pk = inbox[0][p];
        LdeMsg m;
        if (pk.size() != 2 || !parse_lde(params_, v.n, pk[0], m)) {
            return false;
        }
        if (m.z != own.z || m.v != own.v) {
            return false;
        }
        nbr[p] = m.label;
        nx[p] = m.x;
        flags[p] = pk[1].size() == 1 && pk[1][0];
    }
    std::vector<int> children;
    if (!check_tree_label(v, own.label, nbr, flags, &children)) {
        return false;
    }
    Big acc = local_share(v.id, own.z);
    for (int p : children) {
        acc = params_.field.add(acc, nx[p]);
    }
    if (acc != own.x) {
        return false;
    }
    return own.label.parent_port >= 0 || own.x == own.v;
}

ProverFactory lde_prover(const LdeProtocol& p, const Graph& g, std::vector<Big> z, const Big& lie)
{
    auto parent = bfs_parents(g, 0);
    auto labels = labels_from_parents(g, parent);
    const Field& f = p.params().field;
    std::vector<Big> x(g.n);
    for (int u = 0; u < g.n; ++u) {
        x[u] = p.local_share(u, z);
    }
    for (int u : bottom_up_order(g, parent)) {
        if (parent[u] >= 0) {
            x[parent[u]] = f.add(x[parent[u]], x[u]);
        }
    }
    Big v = f.add(x[0], f.reduce(lie));
    std::vector<Bits> msgs;
    for (int u = 0; u < g.n; ++u) {
        msgs.push_back(p.encode(g.n, labels[u], z, v, x[u]));
    }
    return fixed_prover(msgs);
}

} // namespace dip
