#include "dip/blocks.hpp"
#include "dip/clique.hpp"
#include "dip/loglog.hpp"
#include "dip/o1tree.hpp"
#include "dip/seteq.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace dip;

namespace {

std::vector<testutil::PlainBlock> plain(const BlockDecomposition& d)
{
    std::vector<testutil::PlainBlock> out;
    for (const auto& b : d.blocks) {
        out.push_back({b.root, b.members});
    }
    return out;
}

std::string check(const Graph& g, const BlockDecomposition& d)
{
    return testutil::block_properties(g.n, d.parent, plain(d), d.top, d.b);
}

double reject_rate(const Protocol& p, const Graph& g, const ProverFactory& f, size_t trials, uint64_t seed)
{
    return 1.0 - monte_carlo(p, g, f, trials, seed).accept_rate;
}

// Majority verdict of independent runs.
bool verdict(const Protocol& p, const Graph& g, const ProverFactory& f, uint64_t seed, size_t runs = 5)
{
    return 2 * monte_carlo(p, g, f, runs, seed).accepted > runs;
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

TEST(O1Tree, HonestPathRootedAtEndpoint)
{
    Graph g = path_graph(5);
    O1TreeProtocol p(8);
    auto d3 = honest_d3(g, 0);
    EXPECT_EQ(d3, (std::vector<uint8_t>{0, 1, 2, 0, 1}));
    auto parent = o1_parents(g, d3);
    EXPECT_EQ(parent, (std::vector<int>{-1, 0, 1, 2, 3}));
    auto run = run_protocol(p, g, o1_prover(p, g, O1Strategy::Honest, 0), 1);
    EXPECT_TRUE(run.accept);
    EXPECT_EQ(o1_parents(g, p.read_d3(run.messages[0])), parent);
}

TEST(O1Tree, ParentPrefersSmallerPort)
{
    // In C4 from root 0, node 2 has two neighbors at distance 1.
    Graph g = cycle_graph(4);
    auto parent = o1_parents(g, honest_d3(g, 0));
    EXPECT_EQ(parent[2], g.adj[2][0]);
}

TEST(O1Tree, AllEqualOnTriangleRejectedWithEightReps)
{
    Graph g = cycle_graph(3);
    O1TreeProtocol p(8);
    EXPECT_EQ(o1_parents(g, o1_forged_d3(g, O1Strategy::AllEqual)), (std::vector<int>{-1, -1, -1}));
    EXPECT_GE(reject_rate(p, g, o1_prover(p, g, O1Strategy::AllEqual), 2000, 1), 0.99);
}

// d3 can only close a parent cycle whose length is a multiple of 3.
TEST(O1Tree, CycleForgeryNeedsCycleLengthDivisibleByThree)
{
    EXPECT_THROW(o1_forged_d3(cycle_graph(4), O1Strategy::CycleForge), GraphError);
    EXPECT_THROW(o1_forged_d3(path_graph(6), O1Strategy::CycleForge), GraphError);
    Graph g = cycle_graph(6);
    auto parent = o1_parents(g, o1_forged_d3(g, O1Strategy::CycleForge));
    EXPECT_FALSE(testutil::spanning_tree(g, parent));
    for (int u = 0; u < 6; ++u) {
        EXPECT_GE(parent[u], 0);
    }
}

// One repetition catches each forgery with probability about 1/2.
TEST(O1Tree, PerRepetitionDetection)
{
    O1TreeProtocol p(1);
    struct Case {
        Graph g;
        O1Strategy s;
    };
    std::vector<Case> cases{{cycle_graph(3), O1Strategy::AllEqual},
                            {path_graph(7), O1Strategy::AllEqual},
                            {path_graph(7), O1Strategy::TwoRoot},
                            {gnp_graph(12, 0.3, 5), O1Strategy::TwoRoot},
                            {cycle_graph(6), O1Strategy::CycleForge},
                            {cycle_graph(9), O1Strategy::CycleForge}};
    for (const auto& c : cases) {
        EXPECT_GE(reject_rate(p, c.g, o1_prover(p, c.g, c.s), 4000, 2), 0.45) << o1_strategy_names()[static_cast<int>(c.s)];
    }
}

// A non-tree labeling survives each repetition with probability at most
// 1/2, so over arbitrary labelings Pr[accept and not a tree] <= 2^-t.
// Honest runs are always trees.
TEST(O1Tree, PropertyAcceptedNonTreesBoundedByTwoToMinusT)
{
    std::mt19937_64 rng(3);
    O1TreeProtocol p(2);
    size_t runs = 0, bad = 0, accepted = 0;
    for (int i = 0; i < 60; ++i) {
        Graph g = testutil::random_connected_graph(3 + static_cast<int>(rng() % 10), 0.3, rng);
        std::vector<uint8_t> d3(g.n);
        for (auto& x : d3) {
            x = static_cast<uint8_t>(rng() % 3);
        }
        if (i % 3 == 0) {
            d3 = honest_d3(g, static_cast<int>(rng() % static_cast<uint64_t>(g.n)));
            d3[rng() % static_cast<uint64_t>(g.n)] = static_cast<uint8_t>(rng() % 3);
        }
        monte_carlo(p, g, o1_labels_prover(p, d3), 20, rng(), [&](size_t, const ProtocolRun& run) {
            ++runs;
            if (run.accept) {
                ++accepted;
                bad += testutil::spanning_tree(g, o1_parents(g, p.read_d3(run.messages[0]))) ? 0 : 1;
            }
        });
        auto honest = monte_carlo(p, g, o1_prover(p, g, O1Strategy::Honest), 5, rng(),
                                  [&](size_t, const ProtocolRun& run) {
                                      ASSERT_TRUE(run.accept);
                                      EXPECT_TRUE(testutil::spanning_tree(g, o1_parents(g, p.read_d3(run.messages[0]))));
                                  });
        EXPECT_EQ(honest.accepted, 5u);
    }
    EXPECT_GT(accepted, bad);
    EXPECT_LE(static_cast<double>(bad) / static_cast<double>(runs), 0.25 + testutil::three_sigma(0.25, runs));
}

TEST(O1Tree, HonestBitsLinearInReps)
{
    std::mt19937_64 rng(4);
    for (int t : {1, 4, 8, 16}) {
        O1TreeProtocol p(t);
        Graph g = testutil::random_connected_graph(20, 0.2, rng);
        auto s = monte_carlo(p, g, o1_prover(p, g, O1Strategy::Honest), 5, 1);
        EXPECT_DOUBLE_EQ(s.accept_rate, 1.0);
        EXPECT_LE(s.max_bits_per_node_per_round, static_cast<size_t>(3 * t + 2)) << t;
    }
}

TEST(Redistribution, StarCenterSpreadsOverChildren)
{
    Graph g = star_graph(6);
    auto parent = bfs_parents(g, 0);
    std::vector<size_t> payload(7, 4);
    payload[0] = 24;
    auto plan = degree_redistribution(g, parent, payload, 4);
    for (int c = 1; c <= 6; ++c) {
        // The center's fragment c-1 and the leaf's own.
        EXPECT_EQ(plan.carries[c].size(), 2u);
        EXPECT_EQ(plan.carries[c][0].first, 0);
        EXPECT_EQ(plan.carries[c][0].second, c - 1);
        EXPECT_EQ(plan.physical_bits[c], 8u);
    }
    EXPECT_EQ(plan.physical_bits[0], 0u);
    EXPECT_THROW(degree_redistribution(g, parent, std::vector<size_t>(7, 5), 4), std::invalid_argument);
}

TEST(Redistribution, PathIsIdentityPlusParent)
{
    Graph g = path_graph(6);
    auto parent = bfs_parents(g, 0);
    std::vector<size_t> payload(6, 3);
    auto plan = degree_redistribution(g, parent, payload, 3);
    EXPECT_EQ(plan.carries[0].size(), 0u);
    for (int u = 1; u < 5; ++u) {
        // Parent's only fragment.
        EXPECT_EQ(plan.carries[u], (std::vector<std::pair<int, int>>{{u - 1, 0}}));
    }
    EXPECT_EQ(plan.carries[5], (std::vector<std::pair<int, int>>{{4, 0}, {5, 0}}));
}

// Payloads of deg(u) * beta bits: every fragment is delivered exactly once,
// by its owner or one of its children, and no node holds more than 2 beta.
TEST(Redistribution, PropertyRandomTrees)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        Graph g = testutil::random_tree_graph(2 + static_cast<int>(rng() % 40), rng);
        int root = static_cast<int>(rng() % static_cast<uint64_t>(g.n));
        auto parent = bfs_parents(g, root);
        size_t beta = 1 + rng() % 8;
        std::vector<size_t> payload(g.n);
        for (int u = 0; u < g.n; ++u) {
            payload[u] = static_cast<size_t>(g.deg(u)) * beta;
        }
        auto plan = degree_redistribution(g, parent, payload, beta);
        std::map<std::pair<int, int>, int> seen;
        for (int v = 0; v < g.n; ++v) {
            EXPECT_LE(plan.physical_bits[v], 2 * beta);
            for (auto [owner, idx] : plan.carries[v]) {
                EXPECT_TRUE(owner == v || parent[v] == owner);
                ++seen[{owner, idx}];
            }
        }
        for (int u = 0; u < g.n; ++u) {
            for (int k = 0; k < g.deg(u); ++k) {
                EXPECT_EQ((seen[{u, k}]), 1);
            }
        }
        EXPECT_LE(plan.max_physical(), 2 * beta);
    }
}

TEST(Blocks, PathOfNineWithThree)
{
    Graph g = path_graph(9);
    auto d = greedy_blocks(g, bfs_parents(g, 0), 3);
    EXPECT_EQ(check(g, d), "");
    EXPECT_EQ(d.tree_root(), 0);
    // Blocks share their roots, so eight edges make four blocks of three
    // nodes: {6,7,8}, {4,5,6}, {2,3,4} and the top {0,1,2}.
    ASSERT_EQ(d.blocks.size(), 4u);
    for (size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(d.block_size(static_cast<int>(i)), 3u);
    }
    EXPECT_EQ(d.blocks[d.top].root, 0);
    EXPECT_EQ(d.blocks[0].members, (std::vector<int>{7, 8}));
}

TEST(Blocks, StarCenterRootsSeveralBlocks)
{
    Graph g = star_graph(8);
    auto d = greedy_blocks(g, bfs_parents(g, 0), 3);
    EXPECT_EQ(check(g, d), "");
    EXPECT_GE(d.blocks.size(), 2u);
    for (const auto& b : d.blocks) {
        EXPECT_EQ(b.root, 0);
    }
    auto labels = block_labels(g, d);
    EXPECT_EQ(labels[0].type, 2);
}

TEST(Blocks, LabelsRoundTrip)
{
    std::mt19937_64 rng(6);
    for (int b : {2, 3, 5, 9}) {
        for (int i = 0; i < 100; ++i) {
            uint64_t cap = uint64_t{1} << block_field_bits(b);
            BlockLabel l{static_cast<uint8_t>(rng() % 3), rng() % 2 == 1, rng() % 2 == 1, rng() % 2 == 1,
                         rng() % cap, rng() % cap, rng() % cap};
            uint64_t v = pack_block_label(b, l);
            EXPECT_LT(v, uint64_t{1} << block_label_bits(b));
            EXPECT_EQ(unpack_block_label(b, v), l);
        }
    }
}

// All four decomposition properties on random trees, plus the local label
// checks accepting the honest labeling.
TEST(Blocks, PropertyHonestDecompositions)
{
    std::mt19937_64 rng(7);
    for (int b : {2, 3, 5}) {
        for (int i = 0; i < 200; ++i) {
            Graph g = testutil::random_tree_graph(b + static_cast<int>(rng() % 60), rng);
            int root = static_cast<int>(rng() % static_cast<uint64_t>(g.n));
            auto d = greedy_blocks(g, bfs_parents(g, root), b);
            ASSERT_EQ(check(g, d), "") << "b=" << b << " n=" << g.n;
            auto labels = block_labels(g, d);
            for (int k = 0; k < static_cast<int>(d.blocks.size()); ++k) {
                auto h = d.holders(k);
                std::set<uint64_t> idx;
                for (int u : h) {
                    EXPECT_EQ(d.home[u], k);
                    idx.insert(labels[u].hidx);
                }
                EXPECT_EQ(idx.size(), h.size());
                EXPECT_EQ(*idx.rbegin(), h.size() - 1);
            }
        }
    }
}

TEST(Blocks, ProtocolAcceptsHonestRejectsUndersize)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
        Graph g = testutil::random_connected_graph(10 + static_cast<int>(rng() % 30), 0.1, rng);
        BlockProtocol p(3, 8);
        EXPECT_DOUBLE_EQ(monte_carlo(p, g, block_prover(p, g, BlockStrategy::Honest), 5, rng()).accept_rate, 1.0);
        auto forged = strategy_blocks(g, 3, BlockStrategy::Undersize);
        EXPECT_NE(check(g, forged), "");
        EXPECT_GE(reject_rate(p, g, block_prover(p, g, BlockStrategy::Undersize), 50, rng()), 0.95);
    }
}

TEST(Blocks, DefaultParameter)
{
    EXPECT_EQ(default_block_param(2), 2);
    EXPECT_EQ(default_block_param(64), 6);
    EXPECT_EQ(default_block_param(1000), 10);
    EXPECT_THROW(greedy_blocks(path_graph(3), bfs_parents(path_graph(3), 0), 1), std::invalid_argument);
}

TEST(Loglog, EqualListsAccept)
{
    Graph g = random_tree(40, 2);
    std::vector<uint64_t> a(40);
    std::iota(a.begin(), a.end(), 1);
    auto b = a;
    std::shuffle(b.begin(), b.end(), std::mt19937_64(1));
    auto p = LoglogProtocol::set_equality(singletons(a), singletons(b), 4);
    EXPECT_DOUBLE_EQ(monte_carlo(*p, g, loglog_prover(p, LoglogStrategy::Honest), 20, 3).accept_rate, 1.0);
}

// Honest verdicts agree with the O(log n) SetEquality on the same lists.
TEST(Loglog, PropertyAgreesWithLogSetEquality)
{
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        int n = 4 + static_cast<int>(rng() % 30);
        Graph g = testutil::random_connected_graph(n, 0.1, rng);
        std::vector<uint64_t> a(n), b(n);
        for (auto& x : a) {
            x = 1 + rng() % (4 * static_cast<uint64_t>(n));
        }
        b = a;
        std::shuffle(b.begin(), b.end(), rng);
        bool equal = rng() % 2 == 0;
        if (!equal) {
            b[rng() % b.size()] += 1;
        }
        auto ll = LoglogProtocol::set_equality(singletons(a), singletons(b), 2 + static_cast<int>(rng() % 4));
        SetEqualityProtocol lg(singletons(a), singletons(b));
        uint64_t seed = rng();
        bool v_ll = verdict(*ll, g, loglog_prover(ll, LoglogStrategy::Honest), seed);
        bool v_lg = verdict(lg, g, seteq_prover(lg, SetEqStrategy::Honest), seed);
        EXPECT_EQ(v_ll, v_lg) << i;
        EXPECT_EQ(v_ll, equal) << i;
    }
}

TEST(Loglog, TamperRejectedAtSixtyFour)
{
    const int n = 64;
    Graph g = random_tree(n, 4);
    std::vector<uint64_t> a(n);
    std::iota(a.begin(), a.end(), 1);
    auto b = a;
    std::shuffle(b.begin(), b.end(), std::mt19937_64(2));
    b[10] = 1000;
    auto p = LoglogProtocol::set_equality(singletons(a), singletons(b), 6);
    for (const auto& s : loglog_strategy_names()) {
        EXPECT_GE(reject_rate(*p, g, loglog_prover(p, loglog_strategy(s)), 500, 5), 0.9) << s;
    }
}

// A flipped shard on an equal instance breaks one block link.
TEST(Loglog, ShardFlipOnEqualInstanceRejected)
{
    const int n = 30;
    Graph g = random_tree(n, 6);
    std::vector<uint64_t> a(n);
    std::iota(a.begin(), a.end(), 1);
    auto p = LoglogProtocol::set_equality(singletons(a), singletons(a), 3);
    EXPECT_GE(reject_rate(*p, g, loglog_prover(p, LoglogStrategy::ShardFlip), 200, 7), 0.9);
}

TEST(Loglog, DSymOnCycle)
{
    Graph g = cycle_graph(8);
    std::vector<int> rot(8), bad(8);
    for (int i = 0; i < 8; ++i) {
        rot[i] = (i + 1) % 8;
        bad[i] = i;
    }
    std::swap(bad[0], bad[2]);
    ASSERT_FALSE(testutil::is_automorphism(g, bad));
    auto yes = dsym_loglog(g, rot, 2);
    EXPECT_DOUBLE_EQ(monte_carlo(*yes, g, loglog_prover(yes, LoglogStrategy::Honest), 20, 1).accept_rate, 1.0);
    auto no = dsym_loglog(g, bad, 2);
    for (const auto& s : loglog_strategy_names()) {
        EXPECT_GE(reject_rate(*no, g, loglog_prover(no, loglog_strategy(s)), 200, 2), 0.95) << s;
    }
}

// DSym verdicts of the loglog and log protocols agree with each other and
// with a direct automorphism check.
TEST(Loglog, PropertyDSymParity)
{
    std::mt19937_64 rng(10);
    for (int i = 0; i < 50; ++i) {
        int n = 4 + static_cast<int>(rng() % 8);
        Graph g = i % 2 == 0 ? cycle_graph(n) : testutil::random_connected_graph(n, 0.3, rng);
        std::vector<int> pi(n);
        if (i % 4 == 0) {
            int r = static_cast<int>(rng() % static_cast<uint64_t>(n));
            for (int u = 0; u < n; ++u) {
                pi[u] = (u + r) % n;
            }
        } else {
            std::iota(pi.begin(), pi.end(), 0);
            if (i % 4 != 1) {
                std::shuffle(pi.begin(), pi.end(), rng);
            }
        }
        bool truth = testutil::is_automorphism(g, pi);
        auto ll = dsym_loglog(g, pi, 2);
        DSymLogProtocol lg(g, pi);
        uint64_t seed = rng();
        EXPECT_EQ(verdict(*ll, g, loglog_prover(ll, LoglogStrategy::Honest), seed), truth) << i;
        EXPECT_EQ(verdict(lg, g, seteq_prover(lg, SetEqStrategy::Honest), seed), truth) << i;
    }
}

TEST(SumUpTree, OnesSumToN)
{
    Graph g = random_tree(20, 1);
    auto p = sum_up_tree(std::vector<uint64_t>(20, 1), 20, 3);
    EXPECT_DOUBLE_EQ(monte_carlo(*p, g, loglog_prover(p, LoglogStrategy::Honest), 20, 1).accept_rate, 1.0);
    auto off = sum_up_tree(std::vector<uint64_t>(20, 1), 21, 3);
    for (const auto& s : loglog_strategy_names()) {
        EXPECT_GE(reject_rate(*off, g, loglog_prover(off, loglog_strategy(s)), 200, 2), 0.95) << s;
    }
}

TEST(SumUpTree, PropertyRandomValuesTrueSum)
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 40; ++i) {
        int n = 3 + static_cast<int>(rng() % 40);
        Graph g = testutil::random_connected_graph(n, 0.1, rng);
        std::vector<uint64_t> v(n);
        uint64_t sum = 0;
        for (auto& x : v) {
            x = rng() % 1000;
            sum += x;
        }
        auto p = sum_up_tree(v, sum, 2 + static_cast<int>(rng() % 4));
        EXPECT_TRUE(verdict(*p, g, loglog_prover(p, LoglogStrategy::Honest), rng())) << i;
    }
}

TEST(Clique, PlantedFourAccepts)
{
    CliqueProtocol p(4, 8);
    for (uint64_t seed = 0; seed < 10; ++seed) {
        Graph g = generate_from_spec("planted_clique:8,4", seed);
        EXPECT_DOUBLE_EQ(monte_carlo(p, g, clique_prover(p, g, CliqueStrategy::Honest), 20, seed).accept_rate, 1.0);
        EXPECT_DOUBLE_EQ(monte_carlo(p, g, clique_prover(p, g, CliqueStrategy::ExtraMark), 20, seed).accept_rate, 0.0);
    }
}

// Every 4-subset of C5 with every leader choice is rejected.
TEST(Clique, FiveCycleRejectsEveryMarking)
{
    Graph g = cycle_graph(5);
    CliqueProtocol p(4, 8);
    int markings = 0;
    for (int skip = 0; skip < 5; ++skip) {
        std::vector<int> marked;
        for (int u = 0; u < 5; ++u) {
            if (u != skip) {
                marked.push_back(u);
            }
        }
        for (int leader : marked) {
            ++markings;
            EXPECT_DOUBLE_EQ(monte_carlo(p, g, clique_marking_prover(p, g, marked, leader), 20, 1).accept_rate, 0.0);
        }
    }
    EXPECT_EQ(markings, 20);
}

// Honest acceptance iff a K-clique exists.
TEST(Clique, PropertyHonestMatchesExhaustiveSearch)
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 80; ++i) {
        int n = 4 + static_cast<int>(rng() % 6);
        int K = 2 + static_cast<int>(rng() % 3);
        Graph g = testutil::random_connected_graph(n, 0.2 + 0.1 * static_cast<double>(rng() % 5), rng);
        CliqueProtocol p(K, 8);
        bool truth = testutil::has_clique(g, K);
        EXPECT_EQ(find_clique(g, K).has_value(), truth);
        EXPECT_EQ(verdict(p, g, clique_prover(p, g, CliqueStrategy::Honest), rng()), truth) << i;
    }
}
