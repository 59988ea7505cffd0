#pragma once

#include "dip/bits.hpp"
#include "dip/graph.hpp"
#include "dip/rng.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace dip {

enum class Dir { ProverToNodes, NodesToProver };

// What a node may look at: itself, its ports, its input. Instance data that
// is an input of node u lives in the protocol object and is read only at u.
struct NodeView {
    int id;
    int n;
    const std::vector<int>& neighbors;
    const std::vector<EdgeLabel>& labels;
    const std::vector<uint8_t>& input;
    int deg() const { return static_cast<int>(neighbors.size()); }
};

// Everything node u has seen on the prover channel: msgs[i] is the prover's
// message to u (ProverToNodes) or u's own message (NodesToProver). The
// cache lets a protocol keep parsed state between exchange and decision.
struct NodeTranscript {
    std::vector<Bits> msgs;
    std::shared_ptr<void> cache;
};

// One neighbor-to-neighbor transmission: a list of delimited bit strings.
using Packet = std::vector<Bits>;
// inbox[step][port]
using Inbox = std::vector<std::vector<Packet>>;

size_t packet_bits(const Packet& p);

class Protocol {
  public:
    virtual ~Protocol() = default;

    virtual std::string name() const = 0;
    virtual std::vector<Dir> schedule() const = 0;
    virtual bool public_coin() const { return true; }
    // Asymptotic per-node budget, for reporting.
    virtual std::string budget() const { return "O(log n)"; }
    // Hard cap on any single message to or from one node.
    virtual size_t bit_cap(int n) const;

    // Node u's message for a NodesToProver slot. Only tape bits may be used
    // in a public-coin protocol, and they must come out of take()/uniform().
    virtual Bits node_message(int msg, const NodeView& view, RandomTape& tape) const;

    // Neighbor exchange runs after the last prover message. Returns one
    // packet per port.
    virtual int exchange_steps() const { return 1; }
    virtual std::vector<Packet> node_exchange(int step, const NodeView& view, NodeTranscript& tr,
                                              const Inbox& inbox) const;

    virtual bool node_decide(const NodeView& view, NodeTranscript& tr, const Inbox& inbox) const = 0;
};

// The prover sees the whole graph and every node-to-prover message so far.
struct ProverView {
    const Graph& graph;
    // node_msgs[i][u]; empty for ProverToNodes slots and future slots.
    const std::vector<std::vector<Bits>>& node_msgs;
};

class Prover {
  public:
    virtual ~Prover() = default;
    // One message per node for ProverToNodes slot msg.
    virtual std::vector<Bits> respond(int msg, const ProverView& view) = 0;
};

// Builds a fresh prover for one run; the seed feeds any prover randomness.
using ProverFactory = std::function<std::unique_ptr<Prover>(uint64_t seed)>;

// A stateless prover given as a function of the view and a per-run RNG.
using RespondFn = std::function<std::vector<Bits>(int msg, const ProverView& view, std::mt19937_64& rng)>;
ProverFactory lambda_prover(RespondFn fn);
// Sends the same per-node messages at every prover slot.
ProverFactory fixed_prover(std::vector<Bits> msgs);

struct ProtocolRun {
    std::string protocol;
    int n = 0;
    uint64_t seed = 0;
    int rounds = 0;
    bool accept = false;
    std::vector<char> node_accept;
    // messages[i][u] and bits[i][u] = messages[i][u].size()
    std::vector<std::vector<Bits>> messages;
    std::vector<std::vector<size_t>> bits;
    // exchange_bits[step][u]: bits u sent summed over ports;
    // exchange_port_max[u]: largest single-port packet u ever sent.
    std::vector<std::vector<size_t>> exchange_bits;
    std::vector<size_t> exchange_port_max;
    std::vector<char> overflow;
    bool any_overflow = false;
    // Set when every node-to-prover message replayed as verbatim tape slices.
    bool coins_verified = false;

    size_t max_bits_per_node_per_round() const;
    size_t total_message_bits() const;
    double mean_bits_per_node_per_round() const;
};

class ProtocolError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    // 0 keeps the protocol's own cap.
    size_t bit_cap = 0;
};

ProtocolRun run_protocol(const Protocol& proto, const Graph& g, Prover& prover, uint64_t seed,
                         const RunOptions& opt = {});
ProtocolRun run_protocol(const Protocol& proto, const Graph& g, const ProverFactory& prover, uint64_t seed,
                         const RunOptions& opt = {});

struct Stats {
    std::string protocol;
    int n = 0;
    size_t trials = 0;
    size_t accepted = 0;
    double accept_rate = 0;
    size_t max_bits_per_node_per_round = 0;
    double mean_bits = 0;
    size_t max_exchange_bits = 0;
    int rounds = 0;
    uint64_t seed = 0;
    size_t overflows = 0;
};

// Per-trial callback, for harness code that inspects each run.
using RunHook = std::function<void(size_t trial, const ProtocolRun& run)>;

Stats monte_carlo(const Protocol& proto, const Graph& g, const ProverFactory& prover, size_t trials,
                  uint64_t master_seed, const RunHook& hook = {});

std::string stats_json(const Stats& s);

} // namespace dip
