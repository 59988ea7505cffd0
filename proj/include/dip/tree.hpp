#pragma once

#include "dip/engine.hpp"
#include "dip/field.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace dip {

// Spanning-tree label: parent port (-1 at the root), distance to the root,
// and the root's ID. Every field is written in width_for(n) bits.
struct TreeLabel {
    int parent_port = -1;
    uint64_t dist = 0;
    uint64_t root_id = 0;
    bool operator==(const TreeLabel&) const = default;
};

unsigned tree_label_bits(int n);
void write_tree_label(BitWriter& w, int n, const TreeLabel& l);
TreeLabel read_tree_label(BitReader& r, int n);

// BFS tree with the smallest-port parent; parent[root] = -1.
std::vector<int> bfs_parents(const Graph& g, int root);
std::vector<TreeLabel> labels_from_parents(const Graph& g, const std::vector<int>& parent);
std::vector<TreeLabel> honest_tree_labels(const Graph& g, int root = 0);
// parent node ids read off labels; -1 for a root or an invalid port.
std::vector<int> parents_from_labels(const Graph& g, const std::vector<TreeLabel>& labels);
bool is_spanning_tree(const Graph& g, const std::vector<int>& parent);
// children[u] in port order of u.
std::vector<std::vector<int>> children_of(const Graph& g, const std::vector<int>& parent);
// Nodes ordered so every child precedes its parent.
std::vector<int> bottom_up_order(const Graph& g, const std::vector<int>& parent);

// The local tree checks at one node. nbr[p] is the label of the neighbor at
// port p; points_to_me[p] says that neighbor named us its parent. On success
// children receives the ports of our children.
bool check_tree_label(const NodeView& v, const TreeLabel& own, const std::vector<TreeLabel>& nbr,
                      const std::vector<char>& points_to_me, std::vector<int>* children);

// Exchange packets for tree-based proofs: every port gets the node's proof
// plus one bit saying whether that port is the node's parent.
std::vector<Packet> tree_packets(const NodeView& v, int parent_port, const Bits& proof);

// One-message proof labeling of a spanning tree.
class TreeLabelingProtocol : public Protocol {
  public:
    std::string name() const override { return "tree-labeling"; }
    std::vector<Dir> schedule() const override { return {Dir::ProverToNodes}; }
    std::vector<Packet> node_exchange(int step, const NodeView& v, NodeTranscript& tr,
                                      const Inbox& inbox) const override;
    bool node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const override;
};

// Provers over labels: honest BFS from a root, or a fixed labeling.
ProverFactory tree_label_prover(const std::vector<TreeLabel>& labels);
ProverFactory honest_tree_prover(const Graph& g, int root = 0);
// Adversaries for the tree labeling.
std::vector<TreeLabel> cycle_forgery(const Graph& g);
std::vector<TreeLabel> two_root_forgery(const Graph& g);

enum class AggOp { Sum, Product };

// Summing up the tree: the prover labels the tree and gives each node
// X_u = op over its subtree; u checks X_u = op(x_u, X_children).
class AggregateProtocol : public Protocol {
  public:
    // For Sum, values are integers below 2^value_bits and op is over the
    // integers; for Product, values are elements of field.
    AggregateProtocol(std::vector<Big> values, AggOp op, Field field, std::optional<Big> target = {});

    std::string name() const override { return "aggregate"; }
    std::vector<Dir> schedule() const override { return {Dir::ProverToNodes}; }
    std::vector<Packet> node_exchange(int step, const NodeView& v, NodeTranscript& tr,
                                      const Inbox& inbox) const override;
    bool node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const override;

    unsigned value_bits() const { return width_; }
    Big combine(const Big& a, const Big& b) const;
    Big identity() const;
    const std::vector<Big>& values() const { return values_; }
    Bits encode(int n, const TreeLabel& l, const Big& x) const;
    // X_u for every node under the given parent array.
    std::vector<Big> partials(const Graph& g, const std::vector<int>& parent) const;

  private:
    std::vector<Big> values_;
    AggOp op_;
    Field field_;
    std::optional<Big> target_;
    unsigned width_;
};

Big aggregate_direct(const std::vector<Big>& values, AggOp op, const Field& f);

ProverFactory honest_aggregate_prover(const AggregateProtocol& p, const Graph& g, int root = 0);
// Adds delta to X at one internal node and leaves the rest honest.
ProverFactory inflating_aggregate_prover(const AggregateProtocol& p, const Graph& g, int victim, const Big& delta);

} // namespace dip
