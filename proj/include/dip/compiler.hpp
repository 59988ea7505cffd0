#pragma once

#include "dip/ram.hpp"
#include "dip/seteq.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace dip {

// One compiler run: N participants with run IDs 0..N-1, k steps each, and
// a memory segment of seg words per participant (ID i owns
// [i*seg, (i+1)*seg)). Steps of ID i are t = i*k+1 .. (i+1)*k.
struct RunGeometry {
    const Program* program = nullptr;
    uint64_t participants = 1;
    uint64_t k = 1;
    uint64_t seg = 0;

    uint64_t tau() const { return k * participants; }
    unsigned time_bits() const { return width_for(tau() + 2); }
    unsigned step_bits() const;
    unsigned final_bits() const;
};

// Tagged multiset elements: payload * 4 + tag, with tag 0 memory triples
// (v, a, t), tag 1 state pairs (s, t), tag 2 ID pairs (alpha, id).
struct RamCodec {
    unsigned pc_bits = 0;
    unsigned word_bits = 0;
    unsigned addr_bits = 0;
    unsigned time_bits = 0;
    unsigned alpha_bits = 0;
    unsigned id_bits = 0;

    static RamCodec for_run(const RunGeometry& g, unsigned alpha_bits, unsigned id_bits);
    unsigned width() const;
    Big mem(const Big& v, uint64_t a, uint64_t t) const;
    Big state(const MachineState& s, uint64_t t) const;
    Big id(uint64_t alpha, uint64_t id) const;
};

struct FinalRead {
    Big v = 0;
    uint64_t t = 0;
    bool operator==(const FinalRead&) const = default;
};

// What one participant holds in a run.
struct RunShare {
    uint64_t id = 0;
    std::vector<Big> init;
    std::vector<StepRecord> steps;
    std::vector<FinalRead> finals;
};

void write_steps(BitWriter& w, const RunGeometry& g, const std::vector<StepRecord>& steps);
std::vector<StepRecord> read_steps(BitReader& r, const RunGeometry& g);
void write_finals(BitWriter& w, const RunGeometry& g, const std::vector<FinalRead>& f);
std::vector<FinalRead> read_finals(BitReader& r, const RunGeometry& g);

// The participant's local checks (transition C_j for each step, t_read < t,
// field ranges, and for the last ID that step tau halts with output 1) and
// its contribution to the two sides: left = W u S' and right = R u S.
bool ram_share_lists(const RunGeometry& g, const RamCodec& codec, const RunShare& share, Multiset& left,
                     Multiset& right);

// Honest split of a machine run into per-ID shares.
std::vector<RunShare> split_run(const RunGeometry& g, const std::vector<Big>& memory, const MachineRun& run);

// A public-coin centralized protocol with a RAM verifier, described by the
// words each node contributes to its memory segment.
struct InnerLocal {
    // words[j]: coin words of inner V message j, or chunk words of inner P
    // message j.
    std::vector<std::vector<Big>> words;
};

struct InnerProverState {
    const Graph& graph;
    std::vector<uint64_t> id_of;
    std::vector<InnerLocal> local;
};

struct InnerProtocol {
    std::string name;
    std::vector<Dir> schedule;
    Field word;
    // Per inner message: coin words (V) or chunk words (P) per node.
    std::vector<unsigned> words_per_msg;
    // coin_range[j][w]: coin word w of V message j is uniform below this.
    std::vector<std::vector<Big>> coin_range;
    // Words a node derives locally before its coins and chunks.
    unsigned derived_words = 0;
    unsigned scratch_words = 0;
    uint64_t tau_bound = 1;
    Program program;

    // Node-local derived words; neighbors' entries carry chunk words only.
    // nullopt makes the node reject.
    std::function<std::optional<std::vector<Big>>(const NodeView&, const InnerLocal&, const std::vector<InnerLocal>&)>
        derived;
    // Honest chunk words per node for inner P message j.
    std::function<std::vector<std::vector<Big>>(int j, const InnerProverState&)> honest;

    uint64_t segment() const;
    uint64_t offset(int j) const;  // start of message j's words in a segment
};

enum class IdMode { Permutation, AlphaOrder };

// Memory by ID order, exactly as the centralized verifier sees it.
std::vector<Big> assemble_memory(const InnerProtocol& inner, const std::vector<uint64_t>& node_of_id,
                                 const std::vector<std::vector<Big>>& derived, const std::vector<InnerLocal>& local);

// Derived words of every node, computed as the nodes would.
std::vector<std::vector<Big>> derive_all(const InnerProtocol& inner, const Graph& g,
                                         const std::vector<InnerLocal>& local);

enum class RamStrategy {
    Honest,
    // Sets the halting register to 1 on every HALT01 step.
    StateTamper,
    // A LOAD past the midpoint returns the value its address held before
    // the last overwrite; the rest of the trace is replayed from there.
    StaleRead,
    // Honest trace; the set-equality root claims B = A.
    ForgeRoot,
};

std::vector<std::string> ram_strategy_names();
RamStrategy ram_strategy(const std::string& name);

// The compiled protocol: inner messages with IDs (and alpha ordering when
// the inner verifier speaks first) attached, steps and finals attached to
// the last inner message, then one set-equality (V, P) over the tagged
// multiset of memory, state, and ID elements.
class RamCompiledProtocol : public Protocol {
  public:
    RamCompiledProtocol(std::shared_ptr<const InnerProtocol> inner, int n);

    std::string name() const override { return "ram-compiled:" + inner_->name; }
    std::vector<Dir> schedule() const override;
    Bits node_message(int msg, const NodeView& v, RandomTape& tape) const override;
    std::vector<Packet> node_exchange(int step, const NodeView& v, NodeTranscript& tr,
                                      const Inbox& inbox) const override;
    bool node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const override;

    const InnerProtocol& inner() const { return *inner_; }
    IdMode id_mode() const { return mode_; }
    const RunGeometry& geometry() const { return geo_; }
    const RamCodec& codec() const { return codec_; }
    const SetEqConfig& seteq() const { return cfg_; }
    int n() const { return n_; }
    uint64_t alpha_range() const { return alpha_range_; }
    int first_p() const { return first_p_; }
    int first_v() const { return first_v_; }
    int last_inner() const { return static_cast<int>(inner_->schedule.size()) - 1; }

    // Parsed content of one node's messages; false if malformed.
    struct Parsed {
        uint64_t alpha_ord = 0;
        uint64_t id = 0;
        uint64_t alpha_succ = 0;
        InnerLocal local;
        std::vector<StepRecord> steps;
        std::vector<FinalRead> finals;
        SetEqCoins coins;
        SetEqProof proof;
    };
    bool parse(const NodeTranscript& tr, Parsed& out) const;
    // Left/right lists of one node from its parsed data and derived words.
    bool node_lists(const Parsed& p, const std::vector<Big>& derived, Multiset& left, Multiset& right) const;

    Bits encode_p(int j, const Parsed& p) const;
    Bits encode_seteq_proof(const SetEqProof& p) const;
    std::vector<Big> read_coin_words(int j, BitReader& r) const;

  private:
    std::shared_ptr<const InnerProtocol> inner_;
    int n_;
    IdMode mode_;
    int first_p_ = -1;
    int first_v_ = -1;
    uint64_t alpha_range_ = 1;
    RunGeometry geo_;
    RamCodec codec_;
    SetEqConfig cfg_;
};

ProverFactory ram_prover(std::shared_ptr<const RamCompiledProtocol> p, RamStrategy strategy);

// Inner verifier "the node inputs sum to K": one empty prover message, a
// linear loop that keeps the running sum in memory, output [sum == K].
std::shared_ptr<InnerProtocol> sum_to_k_inner(const std::vector<uint64_t>& inputs, uint64_t K);
std::string sum_to_k_source(int n, uint64_t seg, uint64_t K);

} // namespace dip
