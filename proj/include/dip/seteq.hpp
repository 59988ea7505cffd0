#pragma once

#include "dip/tree.hpp"

#include <vector>

namespace dip {

using Multiset = std::vector<Big>;

// Parameters every node of one SetEquality instance agrees on.
struct SetEqConfig {
    int n = 1;
    Field field;
    uint64_t alpha_range = 1;

    unsigned alpha_bits() const { return width_for(alpha_range); }
    unsigned count_bits() const { return width_for(static_cast<uint64_t>(n) + 1); }
    unsigned coin_bits() const { return field.bits() + alpha_bits(); }
    unsigned proof_bits() const;
};

// alpha in [n^3]; the field is given.
SetEqConfig seteq_config(int n, const Field& f);
// Field of size >= n^(c+3) for elements below element_bound.
SetEqConfig seteq_config_for(int n, const Big& element_bound);

struct SetEqCoins {
    Big s;
    uint64_t alpha = 0;
};

// s uniform in F then alpha uniform in [alpha_range], both by rejection.
Bits draw_seteq_coins(const SetEqConfig& cfg, RandomTape& tape);
bool read_seteq_coins(const SetEqConfig& cfg, BitReader& r, SetEqCoins& out);

struct SetEqProof {
    TreeLabel tree;
    Big s;
    uint64_t alpha = 0;
    Big A;
    Big B;
    uint64_t Q = 0;
};

void write_seteq_proof(const SetEqConfig& cfg, BitWriter& w, const SetEqProof& p);
SetEqProof read_seteq_proof(const SetEqConfig& cfg, BitReader& r);

// prod (a - s) over the list.
Big list_product(const Field& f, const Multiset& list, const Big& s);

// The local checks of node v: tree label, (s, alpha) agree with every
// neighbor, alpha <= alpha_v with s = s_v on equality, A/B/Q subtree
// recurrences, and at the root Q = 1 and A = B.
bool seteq_check(const SetEqConfig& cfg, const NodeView& v, const SetEqCoins& mine, const SetEqProof& own,
                 const std::vector<SetEqProof>& nbr, const std::vector<char>& points_to_me, const Multiset& a,
                 const Multiset& b, std::vector<int>* children = nullptr);

enum class SetEqStrategy {
    Honest,
    // Honest winner, but the announced s is an element of some list, which
    // zeroes both products when that element sits on both sides.
    RootS,
    // Picks the winner among unique-alpha nodes so that s is a root of the
    // difference polynomial, if any such node exists.
    GrindWinner,
    // Honest except the root claims B = A.
    ForgeRoot,
};

std::vector<SetEqProof> seteq_prove(const SetEqConfig& cfg, const Graph& g, const std::vector<SetEqCoins>& coins,
                                    const std::vector<Multiset>& a, const std::vector<Multiset>& b,
                                    SetEqStrategy strategy = SetEqStrategy::Honest, int root = 0);

std::vector<SetEqCoins> parse_all_coins(const SetEqConfig& cfg, const std::vector<Bits>& msgs);

std::vector<std::string> seteq_strategy_names();
SetEqStrategy seteq_strategy(const std::string& name);

// Concatenates fixed-width fields into one element; the first field is the
// most significant.
class TuplePacker {
  public:
    TuplePacker& add(const Big& v, unsigned width);
    TuplePacker& add(uint64_t v, unsigned width) { return add(Big(v), width); }
    Big value() const { return v_; }
    unsigned width() const { return w_; }

  private:
    Big v_ = 0;
    unsigned w_ = 0;
};

// dAM SetEquality over per-node lists.
class SetEqualityProtocol : public Protocol {
  public:
    SetEqualityProtocol(std::vector<Multiset> a, std::vector<Multiset> b, SetEqConfig cfg);
    // Field chosen from the largest element.
    SetEqualityProtocol(std::vector<Multiset> a, std::vector<Multiset> b);

    std::string name() const override { return "set-equality"; }
    std::vector<Dir> schedule() const override { return {Dir::NodesToProver, Dir::ProverToNodes}; }
    Bits node_message(int msg, const NodeView& v, RandomTape& tape) const override;
    std::vector<Packet> node_exchange(int step, const NodeView& v, NodeTranscript& tr,
                                      const Inbox& inbox) const override;
    bool node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const override;

    const SetEqConfig& config() const { return cfg_; }
    const std::vector<Multiset>& a() const { return a_; }
    const std::vector<Multiset>& b() const { return b_; }

  protected:
    std::vector<Multiset> a_;
    std::vector<Multiset> b_;
    SetEqConfig cfg_;
};

ProverFactory seteq_prover(const SetEqualityProtocol& p, SetEqStrategy strategy);

// Each node checks 1 <= a <= n and runs SetEquality on {a} vs {a mod n + 1}.
class PermutationProtocol : public SetEqualityProtocol {
  public:
    explicit PermutationProtocol(const std::vector<uint64_t>& values);
    std::string name() const override { return "permutation"; }
    bool node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const override;

  private:
    std::vector<uint64_t> values_;
};

// dMAM distinctness: the prover names each node's cyclic successor y; nodes
// count descents b = [a >= y] up the tree (root expects exactly one) and run
// SetEquality on {a} vs {y}. The descent count travels in the SetEquality
// proof as C_u.
class DistinctnessProtocol : public Protocol {
  public:
    DistinctnessProtocol(std::vector<uint64_t> values, uint64_t value_bound);

    std::string name() const override { return "distinctness"; }
    std::vector<Dir> schedule() const override
    {
        return {Dir::ProverToNodes, Dir::NodesToProver, Dir::ProverToNodes};
    }
    Bits node_message(int msg, const NodeView& v, RandomTape& tape) const override;
    std::vector<Packet> node_exchange(int step, const NodeView& v, NodeTranscript& tr,
                                      const Inbox& inbox) const override;
    bool node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const override;

    const SetEqConfig& config() const { return cfg_; }
    const std::vector<uint64_t>& values() const { return values_; }
    unsigned value_bits() const { return vbits_; }

  private:
    std::vector<uint64_t> values_;
    unsigned vbits_;
    SetEqConfig cfg_;
};

enum class DistinctStrategy {
    Honest,
    // Successor in (value, id) order: a valid cycle, so duplicates surface
    // as extra descents.
    SortedCycle,
    // Successor is the next larger distinct value: one descent, but Y != A.
    CollapseY,
    // Sorted cycle with the descent counts forged so the root sees 1.
    SumForge,
};

std::vector<std::string> distinct_strategy_names();
ProverFactory distinct_prover(const DistinctnessProtocol& p, DistinctStrategy strategy,
                              SetEqStrategy inner = SetEqStrategy::Honest);

// DSym with a common permutation table pi: node u contributes each edge
// {u, v} with u < v as u*n+v to A and the image edge as min*n+max to B.
class DSymLogProtocol : public SetEqualityProtocol {
  public:
    DSymLogProtocol(const Graph& g, std::vector<int> pi);
    std::string name() const override { return "dsym"; }
};

Multiset edge_list_of(const Graph& g, int u);
Multiset image_edge_list_of(const Graph& g, const std::vector<int>& pi, int u);

} // namespace dip
