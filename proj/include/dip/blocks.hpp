#pragma once

#include "dip/o1tree.hpp"

#include <cstdint>
#include <vector>

namespace dip {

// A block: a subtree of T given by its root and its non-root members in
// block preorder (children in port order).
struct Block {
    int root = -1;
    std::vector<int> members;
    bool top = false;
};

// Edge-disjoint decomposition of a rooted spanning tree. Every node except
// the tree root is a non-root member of exactly one block, its home; the
// tree root's home is the top block, which it roots.
struct BlockDecomposition {
    int b = 2;
    std::vector<int> parent;
    std::vector<Block> blocks;
    std::vector<int> home;
    int top = -1;

    int tree_root() const;
    // Block whose non-root member is the root of block i; -1 for the top.
    int block_parent(int i) const;
    // Members including the root.
    size_t block_size(int i) const { return blocks[i].members.size() + 1; }
    // Non-root members, plus the root for the top block (which comes first).
    std::vector<int> holders(int i) const;
};

// Greedy bottom-up packing: a subtree whose residual size reaches [b, 2b]
// becomes a block; a larger one packs its children in port order into
// blocks of size [b, 2b) and keeps the rest. What remains at the tree root
// merges into the last declared block rooted inside it.
BlockDecomposition greedy_blocks(const Graph& g, const std::vector<int>& parent, int b);

// Per-node labels. type counts blocks rooted at the node (0, 1, 2+); first
// marks the first child of a block at its root; prt says the tree parent is
// the root of the node's home block; sz is the in-block subtree size; bsize
// is the home block's size; hidx is the holder index within the home block.
struct BlockLabel {
    uint8_t type = 0;
    bool first = false;
    bool prt = false;
    bool top = false;
    uint64_t sz = 0;
    uint64_t bsize = 0;
    uint64_t hidx = 0;
    bool operator==(const BlockLabel&) const = default;
};

unsigned block_field_bits(int b);
unsigned block_label_bits(int b);
uint64_t pack_block_label(int b, const BlockLabel& l);
BlockLabel unpack_block_label(int b, uint64_t v);

std::vector<BlockLabel> block_labels(const Graph& g, const BlockDecomposition& d);

// What a node learns about its blocks from its label and its neighbors'.
struct LocalBlocks {
    // Children sharing the node's home block, in port order.
    std::vector<int> home_children;
    // Children of each block the node roots, grouped; top_group is the
    // index of the top block among them, or -1.
    std::vector<std::vector<int>> groups;
    std::vector<uint64_t> group_size;
    int top_group = -1;
};

// The local size and consistency checks of one node, given a spanning tree
// through parent_port / is_child; fills out on success.
bool check_block_labels(const NodeView& v, int b, const BlockLabel& own, const std::vector<BlockLabel>& nbr,
                        int parent_port, const std::vector<char>& is_child, LocalBlocks* out = nullptr);

// The o1-tree with block labels as extra first-message bits.
class BlockProtocol : public O1TreeProtocol {
  public:
    explicit BlockProtocol(int b, int t = 8);

    std::string name() const override { return "blocks"; }
    std::string budget() const override { return "O(t + log b)"; }
    unsigned extra_bits() const override { return block_label_bits(b_); }
    int b() const { return b_; }

  protected:
    bool extra_check(const NodeView& v, uint64_t own, const std::vector<uint64_t>& nbr, int parent_port,
                     const std::vector<char>& is_child) const override;

  private:
    int b_;
};

// Block parameter default: max(2, ceil(log2 n)).
int default_block_param(int n);

enum class BlockStrategy {
    Honest,
    // Labels a decomposition built with a smaller parameter, so that some
    // block is smaller than b.
    Undersize,
};

std::vector<std::string> block_strategy_names();
BlockStrategy block_strategy(const std::string& name);
// The decomposition a strategy labels (honest tree rooted at node 0).
BlockDecomposition strategy_blocks(const Graph& g, int b, BlockStrategy s);
ProverFactory block_prover(const BlockProtocol& p, const Graph& g, BlockStrategy s);

} // namespace dip
