#include "dip/engine.hpp"
#include "dip/seteq.hpp"
#include "dip/tree.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

using namespace dip;

namespace {

// Nodes reveal k coins; the prover echoes them; node u accepts iff the echo
// matches and u is not `veto`. With cheat set, node 0 sends a constant
// instead of tape bits.
class EchoProtocol : public Protocol {
  public:
    EchoProtocol(size_t k, int veto = -1, bool cheat = false) : k_(k), veto_(veto), cheat_(cheat) {}
    std::string name() const override { return "echo"; }
    std::vector<Dir> schedule() const override { return {Dir::NodesToProver, Dir::ProverToNodes}; }
    Bits node_message(int, const NodeView& v, RandomTape& tape) const override
    {
        if (cheat_ && v.id == 0) {
            BitWriter w;
            w.put(0, static_cast<unsigned>(k_));
            return w.take();
        }
        return tape.take(k_);
    }
    bool node_decide(const NodeView& v, NodeTranscript& tr, const Inbox&) const override
    {
        return v.id != veto_ && tr.msgs[0] == tr.msgs[1];
    }

  private:
    size_t k_;
    int veto_;
    bool cheat_;
};

ProverFactory echo_prover()
{
    return lambda_prover([](int, const ProverView& view, std::mt19937_64&) { return view.node_msgs[0]; });
}

std::vector<Multiset> singletons(const std::vector<uint64_t>& v)
{
    std::vector<Multiset> out;
    for (auto x : v) {
        out.push_back({Big(x)});
    }
    return out;
}

} // namespace

TEST(RunProtocol, TreeLabelingHonestOnPathAccepts)
{
    TreeLabelingProtocol p;
    auto run = run_protocol(p, path_graph(4), honest_tree_prover(path_graph(4)), 7);
    EXPECT_TRUE(run.accept);
    EXPECT_EQ(run.rounds, 1);
}

TEST(RunProtocol, SameSeedSameRun)
{
    Graph g = gnp_graph(12, 0.3, 4);
    SetEqualityProtocol p(singletons({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}),
                          singletons({12, 11, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1}));
    auto a = run_protocol(p, g, seteq_prover(p, SetEqStrategy::Honest), 99);
    auto b = run_protocol(p, g, seteq_prover(p, SetEqStrategy::Honest), 99);
    EXPECT_EQ(a.messages, b.messages);
    EXPECT_EQ(a.bits, b.bits);
    EXPECT_EQ(a.exchange_bits, b.exchange_bits);
    EXPECT_EQ(a.node_accept, b.node_accept);
    auto c = run_protocol(p, g, seteq_prover(p, SetEqStrategy::Honest), 100);
    EXPECT_NE(a.messages, c.messages);
}

TEST(RunProtocol, CycleForgeryOnC4Rejects)
{
    TreeLabelingProtocol p;
    Graph g = cycle_graph(4);
    for (uint64_t s = 0; s < 10; ++s) {
        EXPECT_FALSE(run_protocol(p, g, tree_label_prover(cycle_forgery(g)), s).accept);
    }
}

TEST(RunProtocol, BitCountsEqualEncodedLengths)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        Graph g = testutil::random_connected_graph(3 + i, 0.2, rng);
        std::vector<uint64_t> v(g.n);
        std::iota(v.begin(), v.end(), 1);
        SetEqualityProtocol p(singletons(v), singletons(v));
        auto run = run_protocol(p, g, seteq_prover(p, SetEqStrategy::Honest), rng());
        size_t total = 0;
        for (size_t m = 0; m < run.messages.size(); ++m) {
            for (int u = 0; u < g.n; ++u) {
                EXPECT_EQ(run.bits[m][u], run.messages[m][u].size());
                total += run.messages[m][u].size();
            }
        }
        EXPECT_EQ(run.total_message_bits(), total);
        EXPECT_TRUE(run.coins_verified);
    }
}

TEST(RunProtocol, PublicCoinReplayCatchesNonTapeMessage)
{
    Graph g = path_graph(3);
    EchoProtocol honest(16);
    EXPECT_TRUE(run_protocol(honest, g, echo_prover(), 1).accept);
    EchoProtocol cheat(16, -1, true);
    EXPECT_THROW(run_protocol(cheat, g, echo_prover(), 1), ProtocolError);
}

TEST(RunProtocol, GlobalAcceptIsConjunction)
{
    Graph g = cycle_graph(5);
    for (int veto = 0; veto < 5; ++veto) {
        EchoProtocol p(4, veto);
        auto run = run_protocol(p, g, echo_prover(), 3);
        EXPECT_FALSE(run.accept);
        for (int u = 0; u < 5; ++u) {
            EXPECT_EQ(run.node_accept[u] != 0, u != veto);
        }
    }
}

TEST(RunProtocol, OverflowFlaggedAndRejected)
{
    Graph g = path_graph(3);
    EchoProtocol p(4);
    auto big = lambda_prover([](int, const ProverView& view, std::mt19937_64&) {
        std::vector<Bits> out = view.node_msgs[0];
        BitWriter w;
        for (int i = 0; i < 100; ++i) {
            w.put(1, 1);
        }
        out[1] = w.take();
        return out;
    });
    RunOptions opt;
    opt.bit_cap = 64;
    auto run = run_protocol(p, g, big, 1, opt);
    EXPECT_TRUE(run.any_overflow);
    EXPECT_TRUE(run.overflow[1]);
    EXPECT_EQ(run.bits[1][1], 100u);
    EXPECT_FALSE(run.accept);
}

TEST(MonteCarlo, ZeroTrialsIsAnError)
{
    EchoProtocol p(4);
    EXPECT_THROW(monte_carlo(p, path_graph(2), echo_prover(), 0, 1), ProtocolError);
}

TEST(MonteCarlo, TrialSeedsAreDerived)
{
    EchoProtocol p(8);
    std::vector<uint64_t> seeds;
    monte_carlo(p, path_graph(2), echo_prover(), 5, 42,
                [&](size_t, const ProtocolRun& r) { seeds.push_back(r.seed); });
    ASSERT_EQ(seeds.size(), 5u);
    for (size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(seeds[i], derive_seed(42, i));
    }
}

TEST(MonteCarlo, HonestSetEqualityCompleteness)
{
    const int n = 16;
    Graph g = gnp_graph(n, 0.25, 8);
    std::vector<uint64_t> a(n), b(n);
    std::iota(a.begin(), a.end(), 1);
    std::iota(b.rbegin(), b.rend(), 1);
    SetEqualityProtocol p(singletons(a), singletons(b));
    auto s = monte_carlo(p, g, seteq_prover(p, SetEqStrategy::Honest), 1000, 5);
    EXPECT_GE(s.accept_rate, 1.0 - 1.0 / (2 * n));
}

TEST(MonteCarlo, TamperedSetEqualitySoundness)
{
    const int n = 16;
    Graph g = gnp_graph(n, 0.25, 8);
    std::vector<uint64_t> a(n), b(n);
    std::iota(a.begin(), a.end(), 1);
    std::iota(b.begin(), b.end(), 1);
    b[5] = 40;
    SetEqualityProtocol p(singletons(a), singletons(b));
    ASSERT_GE(p.config().field.modulus(), Big(n) * n * n * n);
    for (const auto& s : seteq_strategy_names()) {
        auto st = monte_carlo(p, g, seteq_prover(p, seteq_strategy(s)), 1000, 6);
        EXPECT_LE(st.accept_rate, 0.02) << s;
    }
}

TEST(Stats, JsonSchema)
{
    EchoProtocol p(8);
    auto s = monte_carlo(p, path_graph(3), echo_prover(), 4, 9);
    auto j = nlohmann::json::parse(stats_json(s));
    for (const char* k : {"protocol", "n", "trials", "accept_rate", "max_bits_per_node_per_round", "rounds", "seed"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    EXPECT_EQ(j["n"], 3);
    EXPECT_EQ(j["max_bits_per_node_per_round"], 8);
    EXPECT_EQ(j["accept_rate"], 1.0);
}
