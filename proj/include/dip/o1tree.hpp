#pragma once

#include "dip/tree.hpp"

#include <cstdint>
#include <vector>

namespace dip {

// Parent under mod-3 distance labels: the smallest port whose neighbor has
// d3 = d3(u) - 1 mod 3, or -1 (a root).
int o1_parent_port(const NodeView& v, uint8_t own, const std::vector<uint8_t>& nbr);
std::vector<int> o1_parents(const Graph& g, const std::vector<uint8_t>& d3);
// BFS distances mod 3 from root.
std::vector<uint8_t> honest_d3(const Graph& g, int root);

// Tree reply for t parallel repetitions: s(u) and the broadcast b_r, as t-bit
// masks (t <= 64).
struct O1Reply {
    uint64_t s = 0;
    uint64_t br = 0;
};

// The best reply to coins b given d3: roots set s = b, cycles propagate s
// from an arbitrary start (the closing node fails when the parity is odd),
// and b_r is the first root's coin.
std::vector<O1Reply> o1_best_reply(const Graph& g, const std::vector<uint8_t>& d3, const std::vector<uint64_t>& b);

// dMAM spanning tree with O(1)-bit labels: d3 labels, t coin bits per node,
// then s(u) and b_r per repetition. Subclasses add bits to the first message
// and extra local checks.
class O1TreeProtocol : public Protocol {
  public:
    explicit O1TreeProtocol(int t = 8);

    std::string name() const override { return "o1-tree"; }
    std::vector<Dir> schedule() const override
    {
        return {Dir::ProverToNodes, Dir::NodesToProver, Dir::ProverToNodes};
    }
    std::string budget() const override { return "O(t)"; }
    Bits node_message(int msg, const NodeView& v, RandomTape& tape) const override;
    // Step 0 sends labels and reply; step 1 flags the parent port.
    int exchange_steps() const override { return 2; }
    std::vector<Packet> node_exchange(int step, const NodeView& v, NodeTranscript& tr,
                                      const Inbox& inbox) const override;
    bool node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const override;

    int reps() const { return t_; }
    virtual unsigned extra_bits() const { return 0; }

    Bits encode_labels(uint8_t d3, uint64_t extra) const;
    Bits encode_reply(const O1Reply& r) const;
    // d3 of every node from the first prover message (3 on a malformed one).
    std::vector<uint8_t> read_d3(const std::vector<Bits>& msgs) const;

  protected:
    // is_child[q]: the neighbor at port q named us its parent.
    virtual bool extra_check(const NodeView& v, uint64_t own, const std::vector<uint64_t>& nbr, int parent_port,
                             const std::vector<char>& is_child) const;

  private:
    int t_;
};

enum class O1Strategy {
    Honest,
    // d3 = 0 everywhere: every node is a root.
    AllEqual,
    // BFS from two far-apart roots.
    TwoRoot,
    // d3 counts up around a cycle whose length is a multiple of 3; no root.
    CycleForge,
};

std::vector<std::string> o1_strategy_names();
O1Strategy o1_strategy(const std::string& name);

// d3 labels of each strategy; CycleForge throws GraphError without a cycle
// of length divisible by 3.
std::vector<uint8_t> o1_forged_d3(const Graph& g, O1Strategy s, int root = 0);

// Sends d3 (with extra bits per node) and the best reply.
ProverFactory o1_labels_prover(const O1TreeProtocol& p, std::vector<uint8_t> d3, std::vector<uint64_t> extra = {});
ProverFactory o1_prover(const O1TreeProtocol& p, const Graph& g, O1Strategy s, int root = 0);

// Payload redistribution along a tree: fragment i (of beta bits) of a
// node's payload rides on its i-th child; a fragment beyond the children is
// kept by the node itself.
struct DeliveryPlan {
    size_t beta = 0;
    // carries[v]: (owner, fragment index) pairs physically held by v.
    std::vector<std::vector<std::pair<int, int>>> carries;
    std::vector<size_t> physical_bits;
    size_t max_physical() const;
};

DeliveryPlan degree_redistribution(const Graph& g, const std::vector<int>& parent,
                                   const std::vector<size_t>& payload_bits, size_t beta);

} // namespace dip
