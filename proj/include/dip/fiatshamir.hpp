#pragma once

#include "dip/engine.hpp"
#include "dip/tree.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace dip {

// Keyed SHA-256 standing in for the random oracle, truncated to lambda bits
// (1..256). Every call counts, including repeats.
class RandomOracle {
  public:
    RandomOracle(uint64_t key, unsigned lambda);

    Bits query(const std::vector<uint8_t>& input) const;
    unsigned lambda() const { return lambda_; }
    uint64_t key() const { return key_; }
    uint64_t queries() const { return queries_; }
    void reset_count() const { queries_ = 0; }

  private:
    uint64_t key_;
    unsigned lambda_;
    mutable uint64_t queries_ = 0;
};

// Byte strings fed to the oracle. Every field is length-prefixed, so
// distinct field lists never serialize alike.
class OracleInput {
  public:
    explicit OracleInput(const char* domain);
    OracleInput& u64(uint64_t x);
    OracleInput& bits(const Bits& b);
    OracleInput& bytes(const std::vector<uint8_t>& b);
    const std::vector<uint8_t>& data() const { return data_; }

  private:
    std::vector<uint8_t> data_;
};

// N(u): the node's ID, its neighbors' IDs in port order, and its input.
std::vector<uint8_t> neighborhood_bytes(int u, const std::vector<int>& nbr_ids, const std::vector<uint8_t>& input);

// y_u = R(y_children..., N(u)); a leaf has no children.
Bits merkle_value(const RandomOracle& R, const std::vector<Bits>& child_y, const std::vector<uint8_t>& nu);

struct GraphDigest {
    std::vector<Bits> y;
    Bits root;
};

// Bottom-up digest over a rooted spanning tree (children in port order).
GraphDigest merkle_graph_digest(const Graph& g, const std::vector<int>& parent, const RandomOracle& R);

// The tape that replaces node u's coins in inner round j: block i is
// R(y_r, transcript of u so far, j, u, i).
RandomTape fs_tape(const RandomOracle& R, const Bits& y_r, const std::vector<Bits>& transcript, int round, int node);

// Non-interactive argument labeling from a public-coin protocol. The one
// prover message holds a tree label, y_u, y_r and every inner prover message;
// nodes rebuild their coins from the oracle, check the digest, and run the
// inner checks.
class FiatShamirProtocol : public Protocol {
  public:
    FiatShamirProtocol(std::shared_ptr<const Protocol> inner, RandomOracle oracle);

    std::string name() const override { return "fs:" + inner_->name(); }
    std::vector<Dir> schedule() const override { return {Dir::ProverToNodes}; }
    std::string budget() const override { return "O(lambda log n)"; }
    int exchange_steps() const override { return 1 + inner_->exchange_steps(); }
    std::vector<Packet> node_exchange(int step, const NodeView& v, NodeTranscript& tr,
                                      const Inbox& inbox) const override;
    bool node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const override;

    const Protocol& inner() const { return *inner_; }
    const RandomOracle& oracle() const { return oracle_; }

    struct Label {
        TreeLabel tree;
        Bits y;
        Bits y_root;
        // Inner prover messages, in schedule order.
        std::vector<Bits> prover;
    };
    Bits encode(int n, const Label& l) const;
    bool decode(int n, const Bits& b, Label& out) const;
    // The inner transcript of a node: prover messages from the label, own
    // messages re-derived from the oracle.
    std::vector<Bits> inner_transcript(const NodeView& v, const Label& l) const;

  private:
    std::shared_ptr<const Protocol> inner_;
    RandomOracle oracle_;
};

// Runs the inner interaction against a prover built by inner_prover, with
// coins from the oracle, over the tree rooted at root.
struct FsSimulation {
    std::vector<int> parent;
    GraphDigest digest;
    std::vector<std::vector<Bits>> node_msgs;  // [inner msg][u]
    std::vector<std::vector<Bits>> transcript; // [u][inner msg]
};
FsSimulation fs_simulate(const FiatShamirProtocol& p, const Graph& g, const std::vector<int>& parent,
                         const RandomOracle& R, const ProverFactory& inner_prover, uint64_t seed);
std::vector<Bits> fs_labels(const FiatShamirProtocol& p, const Graph& g, const FsSimulation& s);

// The inner verdict of a simulated transcript, computed as the nodes would
// after the digest checks pass.
bool inner_verdict(const Protocol& inner, const Graph& g, const std::vector<std::vector<Bits>>& transcript);

ProverFactory fs_prover(std::shared_ptr<const FiatShamirProtocol> p, ProverFactory inner_prover, int root = 0);

// Tries random rooted spanning trees, each one a fresh oracle path, until the
// inner verdict accepts or the query budget runs out; then labels the last
// tree tried.
struct GrindResult {
    bool success = false;
    uint64_t attempts = 0;
    uint64_t queries = 0;  // spent by the attempts counted
};
ProverFactory fs_grinding_prover(std::shared_ptr<const FiatShamirProtocol> p, ProverFactory inner_prover,
                                 uint64_t budget, std::shared_ptr<GrindResult> report = nullptr);

// Uniform-ish random spanning tree (random-order BFS from a random root).
std::vector<int> random_spanning_tree(const Graph& g, std::mt19937_64& rng);

} // namespace dip
