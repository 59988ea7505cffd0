#include "dip/engine.hpp"

#include <json.hpp>

#include <algorithm>

namespace dip {

size_t packet_bits(const Packet& p)
{
    size_t s = 0;
    for (const auto& b : p) {
        s += b.size();
    }
    return s;
}

size_t Protocol::bit_cap(int) const
{
    return size_t{1} << 22;
}

Bits Protocol::node_message(int, const NodeView&, RandomTape&) const
{
    return {};
}

std::vector<Packet> Protocol::node_exchange(int, const NodeView& view, NodeTranscript& tr, const Inbox&) const
{
    return std::vector<Packet>(view.deg(), tr.msgs);
}

namespace {

class LambdaProver : public Prover {
  public:
    LambdaProver(RespondFn fn, uint64_t seed) : fn_(std::move(fn)), rng_(make_rng(seed, 77)) {}
    std::vector<Bits> respond(int msg, const ProverView& view) override { return fn_(msg, view, rng_); }

  private:
    RespondFn fn_;
    std::mt19937_64 rng_;
};

} // namespace

ProverFactory lambda_prover(RespondFn fn)
{
    return [fn](uint64_t seed) { return std::make_unique<LambdaProver>(fn, seed); };
}

ProverFactory fixed_prover(std::vector<Bits> msgs)
{
    return lambda_prover([msgs](int, const ProverView&, std::mt19937_64&) { return msgs; });
}

size_t ProtocolRun::max_bits_per_node_per_round() const
{
    size_t m = 0;
    for (const auto& row : bits) {
        for (size_t b : row) {
            m = std::max(m, b);
        }
    }
    return m;
}

size_t ProtocolRun::total_message_bits() const
{
    size_t s = 0;
    for (const auto& row : bits) {
        for (size_t b : row) {
            s += b;
        }
    }
    return s;
}

double ProtocolRun::mean_bits_per_node_per_round() const
{
    if (bits.empty() || n == 0) {
        return 0;
    }
    return static_cast<double>(total_message_bits()) / static_cast<double>(bits.size() * n);
}

ProtocolRun run_protocol(const Protocol& proto, const Graph& g, Prover& prover, uint64_t seed, const RunOptions& opt)
{
    const int n = g.n;
    const auto sched = proto.schedule();
    const size_t cap = opt.bit_cap ? opt.bit_cap : proto.bit_cap(n);

    ProtocolRun run;
    run.protocol = proto.name();
    run.n = n;
    run.seed = seed;
    run.rounds = static_cast<int>(sched.size());
    run.messages.assign(sched.size(), std::vector<Bits>(n));
    run.bits.assign(sched.size(), std::vector<size_t>(n, 0));
    run.overflow.assign(n, 0);
    run.node_accept.assign(n, 0);

    std::vector<NodeView> views;
    views.reserve(n);
    for (int u = 0; u < n; ++u) {
        views.push_back(NodeView{u, n, g.adj[u], g.labels[u], g.inputs[u]});
    }
    std::vector<RandomTape> tapes;
    tapes.reserve(n);
    for (int u = 0; u < n; ++u) {
        tapes.emplace_back(seed, static_cast<uint64_t>(u));
    }
    std::vector<NodeTranscript> tr(n);
    for (auto& t : tr) {
        t.msgs.resize(sched.size());
    }
    std::vector<std::vector<Bits>> node_msgs(sched.size(), std::vector<Bits>(n));
    bool coins_ok = true;

    for (size_t i = 0; i < sched.size(); ++i) {
        if (sched[i] == Dir::NodesToProver) {
            for (int u = 0; u < n; ++u) {
                size_t before = tapes[u].emitted().size();
                Bits m = proto.node_message(static_cast<int>(i), views[u], tapes[u]);
                if (proto.public_coin()) {
                    Bits replay;
                    const auto& em = tapes[u].emitted();
                    for (size_t k = before; k < em.size(); ++k) {
                        replay.append(tapes[u].at(em[k].first, em[k].second));
                    }
                    coins_ok = coins_ok && replay == m;
                }
                if (m.size() > cap) {
                    throw ProtocolError(proto.name() + ": node message over the bit cap");
                }
                run.bits[i][u] = m.size();
                node_msgs[i][u] = m;
                tr[u].msgs[i] = m;
                run.messages[i][u] = std::move(m);
            }
        } else {
            ProverView pv{g, node_msgs};
            std::vector<Bits> resp = prover.respond(static_cast<int>(i), pv);
            resp.resize(n);
            for (int u = 0; u < n; ++u) {
                if (resp[u].size() > cap) {
                    // Flagged and rejected, never truncated.
                    run.overflow[u] = 1;
                    run.any_overflow = true;
                }
                run.bits[i][u] = resp[u].size();
                tr[u].msgs[i] = resp[u];
                run.messages[i][u] = std::move(resp[u]);
            }
        }
    }
    if (proto.public_coin() && !coins_ok) {
        throw ProtocolError(proto.name() + ": node message is not a verbatim tape slice");
    }
    run.coins_verified = proto.public_coin();

    const int steps = proto.exchange_steps();
    std::vector<Inbox> inbox(n);
    for (int u = 0; u < n; ++u) {
        inbox[u].assign(steps, std::vector<Packet>(g.deg(u)));
    }
    run.exchange_bits.assign(steps, std::vector<size_t>(n, 0));
    run.exchange_port_max.assign(n, 0);
    for (int s = 0; s < steps; ++s) {
        std::vector<std::vector<Packet>> out(n);
        for (int u = 0; u < n; ++u) {
            out[u] = proto.node_exchange(s, views[u], tr[u], inbox[u]);
            out[u].resize(g.deg(u));
        }
        for (int u = 0; u < n; ++u) {
            for (int p = 0; p < g.deg(u); ++p) {
                size_t b = packet_bits(out[u][p]);
                run.exchange_bits[s][u] += b;
                run.exchange_port_max[u] = std::max(run.exchange_port_max[u], b);
                int v = g.adj[u][p];
                int back = g.port_of(v, u);
                inbox[v][s][back] = std::move(out[u][p]);
            }
        }
    }

    run.accept = true;
    for (int u = 0; u < n; ++u) {
        bool ok = !run.overflow[u] && proto.node_decide(views[u], tr[u], inbox[u]);
        run.node_accept[u] = ok ? 1 : 0;
        run.accept = run.accept && ok;
    }
    return run;
}

ProtocolRun run_protocol(const Protocol& proto, const Graph& g, const ProverFactory& prover, uint64_t seed,
                         const RunOptions& opt)
{
    auto p = prover(derive_seed(seed, 0x9e0f));
    return run_protocol(proto, g, *p, seed, opt);
}

Stats monte_carlo(const Protocol& proto, const Graph& g, const ProverFactory& prover, size_t trials,
                  uint64_t master_seed, const RunHook& hook)
{
    if (trials == 0) {
        throw ProtocolError("monte_carlo needs at least one trial");
    }
    Stats s;
    s.protocol = proto.name();
    s.n = g.n;
    s.trials = trials;
    s.seed = master_seed;
    s.rounds = static_cast<int>(proto.schedule().size());
    double mean_sum = 0;
    for (size_t i = 0; i < trials; ++i) {
        ProtocolRun run = run_protocol(proto, g, prover, derive_seed(master_seed, i));
        s.accepted += run.accept ? 1 : 0;
        s.max_bits_per_node_per_round = std::max(s.max_bits_per_node_per_round, run.max_bits_per_node_per_round());
        for (size_t b : run.exchange_port_max) {
            s.max_exchange_bits = std::max(s.max_exchange_bits, b);
        }
        s.overflows += run.any_overflow ? 1 : 0;
        mean_sum += run.mean_bits_per_node_per_round();
        if (hook) {
            hook(i, run);
        }
    }
    s.accept_rate = static_cast<double>(s.accepted) / static_cast<double>(trials);
    s.mean_bits = mean_sum / static_cast<double>(trials);
    return s;
}

std::string stats_json(const Stats& s)
{
    nlohmann::ordered_json j;
    j["protocol"] = s.protocol;
    j["n"] = s.n;
    j["trials"] = s.trials;
    j["accept_rate"] = s.accept_rate;
    j["max_bits_per_node_per_round"] = s.max_bits_per_node_per_round;
    j["mean_bits"] = s.mean_bits;
    j["max_exchange_bits"] = s.max_exchange_bits;
    j["rounds"] = s.rounds;
    j["seed"] = s.seed;
    return j.dump();
}

} // namespace dip
