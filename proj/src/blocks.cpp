#include "dip/blocks.hpp"

#include <algorithm>

namespace dip {

int BlockDecomposition::tree_root() const
{
    for (size_t u = 0; u < parent.size(); ++u) {
        if (parent[u] < 0) {
            return static_cast<int>(u);
        }
    }
    return -1;
}

int BlockDecomposition::block_parent(int i) const
{
    return i == top ? -1 : home[blocks[i].root];
}

std::vector<int> BlockDecomposition::holders(int i) const
{
    std::vector<int> h;
    if (i == top) {
        h.push_back(blocks[i].root);
    }
    h.insert(h.end(), blocks[i].members.begin(), blocks[i].members.end());
    return h;
}

BlockDecomposition greedy_blocks(const Graph& g, const std::vector<int>& parent, int b)
{
    if (b < 2) {
        throw std::invalid_argument("block parameter must be at least 2");
    }
    BlockDecomposition d;
    d.b = b;
    d.parent = parent;
    auto children = children_of(g, parent);
    auto order = bottom_up_order(g, parent);
    const int root = order.back();
    const uint64_t ub = static_cast<uint64_t>(b);

    std::vector<uint64_t> residual(g.n, 1);
    // Block a child was packed into; -1 while it travels up with its parent.
    std::vector<int> packed(g.n, -1);
    std::vector<int> declared_at_root;
    auto declare = [&](int u, const std::vector<int>& group) {
        int id = static_cast<int>(d.blocks.size());
        d.blocks.push_back(Block{u, {}, false});
        for (int c : group) {
            packed[c] = id;
        }
        if (u == root) {
            declared_at_root.push_back(id);
        }
        return id;
    };

    for (int u : order) {
        uint64_t cur = 1;
        for (int c : children[u]) {
            cur += residual[c];
        }
        if (cur < ub) {
            residual[u] = cur;
        } else if (cur <= 2 * ub) {
            declare(u, children[u]);
            residual[u] = 1;
        } else {
            std::vector<int> group;
            uint64_t acc = 0;
            for (int c : children[u]) {
                group.push_back(c);
                acc += residual[c];
                if (1 + acc >= ub) {
                    declare(u, group);
                    group.clear();
                    acc = 0;
                }
            }
            if (u == root && !group.empty()) {
                // Leftovers at the tree root join its last block.
                for (int c : group) {
                    packed[c] = declared_at_root.back();
                }
                group.clear();
                acc = 0;
            }
            residual[u] = 1 + acc;
        }
    }

    d.home.assign(g.n, -1);
    if (!declared_at_root.empty()) {
        d.top = declared_at_root.back();
    } else if (d.blocks.empty()) {
        d.top = declare(root, children[root]);
    } else {
        // The residual component R of the root: follow unpacked children.
        std::vector<char> in_r(g.n, 0);
        std::vector<int> st{root};
        in_r[root] = 1;
        while (!st.empty()) {
            int u = st.back();
            st.pop_back();
            for (int c : children[u]) {
                if (packed[c] < 0) {
                    in_r[c] = 1;
                    st.push_back(c);
                }
            }
        }
        for (int i = static_cast<int>(d.blocks.size()) - 1; i >= 0; --i) {
            if (in_r[d.blocks[i].root]) {
                d.top = i;
                break;
            }
        }
        d.blocks[d.top].root = root;
    }
    d.blocks[d.top].top = true;
    d.home[root] = d.top;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int u = *it;
        if (u != root) {
            d.home[u] = packed[u] >= 0 ? packed[u] : d.home[parent[u]];
        }
    }
    // Members in block preorder.
    for (int i = 0; i < static_cast<int>(d.blocks.size()); ++i) {
        std::vector<int> st;
        const int w = d.blocks[i].root;
        for (auto it = children[w].rbegin(); it != children[w].rend(); ++it) {
            if (d.home[*it] == i) {
                st.push_back(*it);
            }
        }
        while (!st.empty()) {
            int u = st.back();
            st.pop_back();
            d.blocks[i].members.push_back(u);
            for (auto it = children[u].rbegin(); it != children[u].rend(); ++it) {
                if (d.home[*it] == i) {
                    st.push_back(*it);
                }
            }
        }
    }
    return d;
}

unsigned block_field_bits(int b)
{
    return width_for(3 * static_cast<uint64_t>(b) + 1);
}

unsigned block_label_bits(int b)
{
    return 5 + 3 * block_field_bits(b);
}

uint64_t pack_block_label(int b, const BlockLabel& l)
{
    const unsigned w = block_field_bits(b);
    const uint64_t mask = (uint64_t{1} << w) - 1;
    uint64_t v = l.type & 3u;
    v = (v << 1) | (l.first ? 1u : 0u);
    v = (v << 1) | (l.prt ? 1u : 0u);
    v = (v << 1) | (l.top ? 1u : 0u);
    v = (v << w) | (l.sz & mask);
    v = (v << w) | (l.bsize & mask);
    v = (v << w) | (l.hidx & mask);
    return v;
}

BlockLabel unpack_block_label(int b, uint64_t v)
{
    const unsigned w = block_field_bits(b);
    const uint64_t mask = (uint64_t{1} << w) - 1;
    BlockLabel l;
    l.hidx = v & mask;
    v >>= w;
    l.bsize = v & mask;
    v >>= w;
    l.sz = v & mask;
    v >>= w;
    l.top = v & 1;
    l.prt = (v >> 1) & 1;
    l.first = (v >> 2) & 1;
    l.type = static_cast<uint8_t>((v >> 3) & 3);
    return l;
}

std::vector<BlockLabel> block_labels(const Graph& g, const BlockDecomposition& d)
{
    std::vector<BlockLabel> out(g.n);
    auto children = children_of(g, d.parent);
    std::vector<int> rooted(g.n, 0);
    for (const auto& blk : d.blocks) {
        ++rooted[blk.root];
    }
    for (int i = 0; i < static_cast<int>(d.blocks.size()); ++i) {
        auto h = d.holders(i);
        for (size_t j = 0; j < h.size(); ++j) {
            out[h[j]].hidx = j;
        }
    }
    auto order = bottom_up_order(g, d.parent);
    for (int u : order) {
        BlockLabel& l = out[u];
        l.type = static_cast<uint8_t>(std::min(rooted[u], 2));
        l.top = d.home[u] == d.top;
        l.bsize = d.block_size(d.home[u]);
        l.sz = 1;
        for (int c : children[u]) {
            if (d.home[c] == d.home[u]) {
                l.sz += out[c].sz;
            }
        }
        int p = d.parent[u];
        if (p >= 0) {
            l.prt = d.blocks[d.home[u]].root == p;
            if (l.prt) {
                for (int c : children[p]) {
                    if (d.home[c] == d.home[u]) {
                        l.first = c == u;
                        break;
                    }
                }
            }
        }
    }
    return out;
}

bool check_block_labels(const NodeView& v, int b, const BlockLabel& own, const std::vector<BlockLabel>& nbr,
                        int parent_port, const std::vector<char>& is_child, LocalBlocks* out)
{
    const bool root = parent_port < 0;
    const uint64_t ub = static_cast<uint64_t>(b);
    if (own.sz == 0 || own.bsize == 0 || own.hidx >= own.bsize) {
        return false;
    }
    if (root) {
        if (own.prt || !own.top || own.hidx != 0 || own.first) {
            return false;
        }
    } else if (!own.prt) {
        const BlockLabel& p = nbr[parent_port];
        if (p.top != own.top || p.bsize != own.bsize || own.first) {
            return false;
        }
    }
    LocalBlocks lb;
    for (int q = 0; q < v.deg(); ++q) {
        if (!is_child[q]) {
            continue;
        }
        if (nbr[q].prt) {
            if (nbr[q].first || lb.groups.empty()) {
                if (!nbr[q].first) {
                    return false;
                }
                lb.groups.emplace_back();
            }
            lb.groups.back().push_back(q);
        } else {
            lb.home_children.push_back(q);
        }
    }
    if (root && !lb.home_children.empty()) {
        return false;
    }
    uint64_t next = own.hidx + 1;
    uint64_t sum = 0;
    for (int q : lb.home_children) {
        if (nbr[q].hidx != next) {
            return false;
        }
        next += nbr[q].sz;
        sum += nbr[q].sz;
    }
    if (!root && own.sz != 1 + sum) {
        return false;
    }
    for (size_t i = 0; i < lb.groups.size(); ++i) {
        const auto& grp = lb.groups[i];
        const bool top = nbr[grp[0]].top;
        uint64_t size = 1;
        for (int q : grp) {
            size += nbr[q].sz;
        }
        uint64_t idx = top ? 1 : 0;
        for (int q : grp) {
            if (nbr[q].top != top || nbr[q].bsize != size || nbr[q].hidx != idx) {
                return false;
            }
            idx += nbr[q].sz;
        }
        if (top) {
            if (!root || lb.top_group >= 0) {
                return false;
            }
            lb.top_group = static_cast<int>(i);
            if (size < std::min<uint64_t>(ub, static_cast<uint64_t>(v.n)) || size > 3 * ub) {
                return false;
            }
        } else if (size < ub || size > 2 * ub) {
            return false;
        }
        lb.group_size.push_back(size);
    }
    if (root) {
        if (lb.groups.empty()) {
            // A single node is its own top block.
            if (v.deg() != 0 || own.sz != 1 || own.bsize != 1 || own.type != 1) {
                return false;
            }
        } else {
            if (lb.top_group < 0) {
                return false;
            }
            uint64_t ts = lb.group_size[lb.top_group];
            if (own.sz != ts || own.bsize != ts) {
                return false;
            }
        }
    }
    if (own.type != std::min<size_t>(root && lb.groups.empty() ? 1 : lb.groups.size(), 2)) {
        return false;
    }
    if (out) {
        *out = std::move(lb);
    }
    return true;
}

BlockProtocol::BlockProtocol(int b, int t) : O1TreeProtocol(t), b_(b)
{
    if (b < 2 || block_label_bits(b) > 60) {
        throw std::invalid_argument("block parameter out of range");
    }
}

bool BlockProtocol::extra_check(const NodeView& v, uint64_t own, const std::vector<uint64_t>& nbr, int parent_port,
                                const std::vector<char>& is_child) const
{
    std::vector<BlockLabel> nl;
    nl.reserve(nbr.size());
    for (uint64_t x : nbr) {
        nl.push_back(unpack_block_label(b_, x));
    }
    return check_block_labels(v, b_, unpack_block_label(b_, own), nl, parent_port, is_child);
}

int default_block_param(int n)
{
    return std::max(2, static_cast<int>(ceil_log2(static_cast<uint64_t>(std::max(n, 1)))));
}

std::vector<std::string> block_strategy_names()
{
    return {"honest", "undersize"};
}

BlockStrategy block_strategy(const std::string& name)
{
    if (name == "honest") {
        return BlockStrategy::Honest;
    }
    if (name == "undersize") {
        return BlockStrategy::Undersize;
    }
    throw std::invalid_argument("unknown block strategy " + name);
}

BlockDecomposition strategy_blocks(const Graph& g, int b, BlockStrategy s)
{
    auto parent = o1_parents(g, honest_d3(g, 0));
    if (s == BlockStrategy::Honest || b <= 2) {
        return greedy_blocks(g, parent, b);
    }
    const uint64_t lo_top = std::min<uint64_t>(static_cast<uint64_t>(b), static_cast<uint64_t>(g.n));
    for (int bp = b - 1; bp >= 2; --bp) {
        auto d = greedy_blocks(g, parent, bp);
        for (int i = 0; i < static_cast<int>(d.blocks.size()); ++i) {
            uint64_t lo = i == d.top ? lo_top : static_cast<uint64_t>(b);
            if (d.block_size(i) < lo) {
                d.b = b;
                return d;
            }
        }
    }
    auto d = greedy_blocks(g, parent, b - 1);
    d.b = b;
    return d;
}

ProverFactory block_prover(const BlockProtocol& p, const Graph& g, BlockStrategy s)
{
    auto d = strategy_blocks(g, p.b(), s);
    auto labels = block_labels(g, d);
    std::vector<uint64_t> extra;
    for (const auto& l : labels) {
        extra.push_back(pack_block_label(p.b(), l));
    }
    return o1_labels_prover(p, honest_d3(g, 0), extra);
}

} // namespace dip
