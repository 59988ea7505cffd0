#pragma once

#include "dip/blocks.hpp"
#include "dip/compiler.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace dip {

// Set equality and tree sums over a block decomposition. Each block's
// aggregate (A, B, and the shared point s) is sharded over its holders, one
// shard of about L/b bits per holder, and every block X is linked to its
// child blocks by one RAM run R(X) whose participants are the holders of X
// and of X's child blocks. All runs share one outer identity point s'.
//
// SetEquality (P V P V P):
//   m0  d3, block label
//   m1  t tree coins, then this node's slice of the coins of c (top holders)
//   m2  tree reply, shards of s, A, B, and per participation (ID, rsz, N,
//       KEY, steps, finals)
//   m3  this node's slice of the coins of c'
//   m4  s', the top partial sum of c' (top holders), per participation PL, PR
// Sum (P V P): m0 carries labels, A shards and runs; m1 tree coins and c'
// coins; m2 tree reply, s', partial sum, PL, PR.
//
// Participations: HOME is the run of the node's home block; PARENT is the
// run of its home block's parent block (absent for top holders). A non-top
// run's tree hangs off its block root w, which relays: it is not a
// participant, it checks the tiling of IDs, N and the products.
enum class LoglogMode { SetEquality, Sum };

// Segment layout of one participant.
struct LoglogLayout {
    uint64_t lmax = 1;
    static constexpr uint64_t KEY = 0, ISX = 1, TOP = 2, SPOW = 3, APOW = 4, BPOW = 5, NA = 6, NB = 7, EA = 8;
    uint64_t EB() const { return EA + lmax; }
    uint64_t ACCS() const { return EA + 2 * lmax; }
    uint64_t ACCA() const { return ACCS() + 1; }
    uint64_t ACCB() const { return ACCS() + 2; }
    uint64_t GPA() const { return ACCS() + 3; }
    uint64_t GPB() const { return ACCS() + 4; }
    uint64_t BASE() const { return ACCS() + 5; }
    uint64_t SVAL() const { return ACCS() + 6; }
    uint64_t seg() const { return ACCS() + 7; }
};

std::string loglog_source(LoglogMode mode, const LoglogLayout& lay, uint64_t N, const Big& K);

class LoglogProtocol : public Protocol {
  public:
    // Lists per node; the field is chosen from the largest element.
    static std::shared_ptr<LoglogProtocol> set_equality(std::vector<Multiset> a, std::vector<Multiset> b, int b_param = 0,
                                                        int t = 8);
    // Node values must sum to K.
    static std::shared_ptr<LoglogProtocol> sum(std::vector<uint64_t> values, uint64_t K, int b_param = 0, int t = 8);

    std::string name() const override { return name_; }
    std::vector<Dir> schedule() const override;
    std::string budget() const override { return "O(log log n)"; }
    Bits node_message(int msg, const NodeView& v, RandomTape& tape) const override;
    int exchange_steps() const override { return 2; }
    std::vector<Packet> node_exchange(int step, const NodeView& v, NodeTranscript& tr,
                                      const Inbox& inbox) const override;
    bool node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const override;

    LoglogMode mode() const { return mode_; }
    int n() const { return n_; }
    int b() const { return b_; }
    int reps() const { return t_; }
    const Field& word() const { return word_; }
    const Field& outer() const { return outer_; }
    const LoglogLayout& layout() const { return lay_; }
    const std::vector<Multiset>& a() const { return a_; }
    const std::vector<Multiset>& b_lists() const { return bl_; }
    const Big& target() const { return K_; }
    unsigned c_bits() const { return word_.bits() + 8; }
    unsigned c2_bits() const { return outer_.bits() + 8; }
    // Coin bits every node reveals per point; top holders' slices are the
    // shards of c (and c') at weight 2^(q * hidx).
    unsigned coin_bits() const;
    unsigned coin2_bits() const;
    static uint64_t holders(const BlockLabel& l) { return l.top ? l.bsize : l.bsize - 1; }
    // Shard widths: s is sharded over non-top blocks, the coins over the top.
    unsigned qc(const BlockLabel& l) const;
    unsigned qa(const BlockLabel& l) const;
    unsigned id_bits() const { return width_for(static_cast<uint64_t>(n_) + 1); }
    uint64_t steps_per_participant(uint64_t N) const;
    const Program& program(uint64_t N) const;
    RunGeometry geometry(uint64_t N) const;

    // Message indices per mode.
    int msg_main() const { return mode_ == LoglogMode::SetEquality ? 2 : 0; }
    int msg_coins2() const { return mode_ == LoglogMode::SetEquality ? 3 : 1; }
    int msg_final() const { return mode_ == LoglogMode::SetEquality ? 4 : 2; }

    // Memory segment of node u in one run, as the node derives it.
    std::vector<Big> segment_words(int u, bool home, const BlockLabel& lab, uint64_t key, const Big& sc, const Big& sa,
                                   const Big& sb) const;
    Big shard_weight(unsigned q, uint64_t hidx, const Field& f) const;

    void set_name(std::string s) { name_ = std::move(s); }

  private:
    LoglogProtocol(LoglogMode mode, std::vector<Multiset> a, std::vector<Multiset> b, Big K, Field word, int b_param,
                   int t);

    LoglogMode mode_;
    std::string name_;
    int n_;
    int b_;
    int t_;
    std::vector<Multiset> a_;
    std::vector<Multiset> bl_;
    Big K_;
    Field word_;
    Field outer_;
    LoglogLayout lay_;
    mutable std::mutex mu_;
    mutable std::map<uint64_t, std::unique_ptr<Program>> programs_;
};

enum class LoglogStrategy {
    Honest,
    // Every run whose machine outputs 0 gets its halting register set to 1.
    StateTamper,
    // Flips the low bit of one A shard of the first non-top block, then
    // tampers the runs that fail.
    ShardFlip,
};

std::vector<std::string> loglog_strategy_names();
LoglogStrategy loglog_strategy(const std::string& name);

ProverFactory loglog_prover(std::shared_ptr<const LoglogProtocol> p, LoglogStrategy s);

// DSym over edge lists with a common permutation table, in SetEquality mode.
std::shared_ptr<LoglogProtocol> dsym_loglog(const Graph& g, const std::vector<int>& pi, int b_param = 0, int t = 8);
// Node values sum to K.
std::shared_ptr<LoglogProtocol> sum_up_tree(const std::vector<uint64_t>& values, uint64_t K, int b_param = 0,
                                            int t = 8);

} // namespace dip
