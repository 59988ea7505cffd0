#pragma once

#include "dip/o1tree.hpp"

#include <optional>

namespace dip {

// dMAM Clique with O(1) bits: the o1-tree plus a mark bit and a leader bit.
// The leader bit must equal "I am the root" and the root must be marked; a
// marked node needs exactly K-1 marked neighbors, one of them the leader
// unless it is the leader itself.
class CliqueProtocol : public O1TreeProtocol {
  public:
    explicit CliqueProtocol(int K, int t = 8);

    std::string name() const override { return "clique"; }
    unsigned extra_bits() const override { return 2; }
    int K() const { return K_; }

    static uint64_t extra(bool mark, bool leader) { return (mark ? 2u : 0u) | (leader ? 1u : 0u); }

  protected:
    bool extra_check(const NodeView& v, uint64_t own, const std::vector<uint64_t>& nbr, int parent_port,
                     const std::vector<char>& is_child) const override;

  private:
    int K_;
};

// Some K-clique by backtracking, smallest IDs first.
std::optional<std::vector<int>> find_clique(const Graph& g, int K);

// Marks exactly `marked` and roots the tree at leader.
ProverFactory clique_marking_prover(const CliqueProtocol& p, const Graph& g, const std::vector<int>& marked,
                                    int leader);

enum class CliqueStrategy {
    Honest,
    // A K-clique plus one more marked node outside it.
    ExtraMark,
};

std::vector<std::string> clique_strategy_names();
CliqueStrategy clique_strategy(const std::string& name);
ProverFactory clique_prover(const CliqueProtocol& p, const Graph& g, CliqueStrategy s);

} // namespace dip
