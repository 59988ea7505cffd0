#include "dip/clique.hpp"

#include <algorithm>
#include <functional>

namespace dip {

CliqueProtocol::CliqueProtocol(int K, int t) : O1TreeProtocol(t), K_(K)
{
    if (K < 2) {
        throw std::invalid_argument("clique size K must be at least 2");
    }
}

bool CliqueProtocol::extra_check(const NodeView& v, uint64_t own, const std::vector<uint64_t>& nbr, int parent_port,
                                 const std::vector<char>&) const
{
    const bool root = parent_port < 0;
    const bool leader = own & 1;
    const bool mark = own & 2;
    if (leader != root || (root && !mark)) {
        return false;
    }
    if (!mark) {
        return true;
    }
    int marked = 0;
    bool sees_leader = leader;
    for (int q = 0; q < v.deg(); ++q) {
        if (nbr[q] & 2) {
            ++marked;
            sees_leader = sees_leader || (nbr[q] & 1);
        }
    }
    return marked == K_ - 1 && sees_leader;
}

std::optional<std::vector<int>> find_clique(const Graph& g, int K)
{
    std::vector<int> cur;
    std::function<bool(int)> grow = [&](int from) -> bool {
        if (static_cast<int>(cur.size()) == K) {
            return true;
        }
        for (int v = from; v < g.n; ++v) {
            if (std::all_of(cur.begin(), cur.end(), [&](int u) { return g.has_edge(u, v); })) {
                cur.push_back(v);
                if (grow(v + 1)) {
                    return true;
                }
                cur.pop_back();
            }
        }
        return false;
    };
    if (K >= 1 && grow(0)) {
        return cur;
    }
    return std::nullopt;
}

ProverFactory clique_marking_prover(const CliqueProtocol& p, const Graph& g, const std::vector<int>& marked,
                                    int leader)
{
    std::vector<uint64_t> extra(g.n, 0);
    for (int u : marked) {
        extra[u] |= CliqueProtocol::extra(true, false);
    }
    extra[leader] |= CliqueProtocol::extra(false, true);
    return o1_labels_prover(p, honest_d3(g, leader), extra);
}

std::vector<std::string> clique_strategy_names()
{
    return {"honest", "extra-mark"};
}

CliqueStrategy clique_strategy(const std::string& name)
{
    if (name == "honest") {
        return CliqueStrategy::Honest;
    }
    if (name == "extra-mark") {
        return CliqueStrategy::ExtraMark;
    }
    throw std::invalid_argument("unknown clique strategy " + name);
}

ProverFactory clique_prover(const CliqueProtocol& p, const Graph& g, CliqueStrategy s)
{
    auto c = find_clique(g, p.K());
    if (!c) {
        // Nothing to mark; the unmarked root rejects.
        return clique_marking_prover(p, g, {}, 0);
    }
    std::vector<int> marked = *c;
    if (s == CliqueStrategy::ExtraMark) {
        for (int u = 0; u < g.n; ++u) {
            if (std::find(marked.begin(), marked.end(), u) == marked.end()) {
                marked.push_back(u);
                break;
            }
        }
    }
    return clique_marking_prover(p, g, marked, marked[0]);
}

} // namespace dip
