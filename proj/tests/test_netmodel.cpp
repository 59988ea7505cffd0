#include "dip/graph.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace dip;

namespace {

std::vector<int> degrees(const Graph& g)
{
    std::vector<int> d;
    for (int u = 0; u < g.n; ++u) {
        d.push_back(g.deg(u));
    }
    return d;
}

EdgeLabel label_of(const Graph& g, int u, int v)
{
    return g.labels[u][g.port_of(u, v)];
}

} // namespace

TEST(LoadGraph, PathFromOneLineLiteral)
{
    Graph g = load_graph("n=3; 0 1; 1 2");
    EXPECT_EQ(g.n, 3);
    EXPECT_EQ(degrees(g), (std::vector<int>{1, 2, 1}));
}

TEST(LoadGraph, RejectsDisconnected)
{
    EXPECT_THROW(load_graph("n=3; 0 1"), GraphError);
}

TEST(LoadGraph, CycleOfFour)
{
    Graph g = load_graph("n=4; 0 1; 1 2; 2 3; 3 0");
    EXPECT_EQ(degrees(g), (std::vector<int>{2, 2, 2, 2}));
    EXPECT_EQ(g.edge_count(), 4u);
}

TEST(LoadGraph, RejectsSelfLoopDuplicateAndGarbage)
{
    EXPECT_THROW(load_graph("n=2; 0 0; 0 1"), GraphError);
    EXPECT_THROW(load_graph("n=2; 0 1; 1 0"), GraphError);
    EXPECT_THROW(load_graph("n=2; 0 x"), GraphError);
    EXPECT_THROW(load_graph("0 1"), GraphError);
    EXPECT_THROW(load_graph("n=2; 0 5"), GraphError);
    EXPECT_THROW(load_graph("n=2; 0 1 g2"), GraphError);
}

TEST(LoadGraph, PortsFollowFileOrderAndLabelsParse)
{
    Graph g = load_graph("n=3\n# comment\n0 2 g0\n0 1 g1  # trailing comment\n1 2\n");
    EXPECT_EQ(g.adj[0], (std::vector<int>{2, 1}));
    EXPECT_EQ(g.port_of(0, 1), 1);
    EXPECT_EQ(label_of(g, 0, 2), EdgeLabel::G0);
    EXPECT_EQ(label_of(g, 2, 0), EdgeLabel::G0);
    EXPECT_EQ(label_of(g, 1, 0), EdgeLabel::G1);
    EXPECT_EQ(label_of(g, 1, 2), EdgeLabel::Both);
}

TEST(LoadGraph, DumpRoundTrips)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        Graph g = testutil::random_connected_graph(2 + i, 0.2, rng);
        EXPECT_EQ(load_graph(dump_graph(g)), g);
    }
}

TEST(Generate, CliqueOfFour)
{
    Graph g = generate_graph("clique", {{"n", "4"}}, 1);
    EXPECT_EQ(g.edge_count(), 6u);
    EXPECT_EQ(g.edge_count(), testutil::edge_set(g).size());
}

TEST(Generate, SmallestAsymmetricIsRigid)
{
    Graph g = generate_graph("smallest_asymmetric", {}, 0);
    EXPECT_EQ(g.n, 6);
    EXPECT_EQ(testutil::brute_automorphisms(g), 1u);
    EXPECT_EQ(testutil::brute_automorphisms(rigid_companion()), 1u);
}

TEST(Generate, PlantedCliquePairsAdjacent)
{
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Graph g = generate_from_spec("planted_clique:8,4", seed);
        ASSERT_EQ(g.n, 8);
        for (int u = 0; u < 4; ++u) {
            for (int v = u + 1; v < 4; ++v) {
                EXPECT_TRUE(g.has_edge(u, v)) << u << "-" << v;
            }
        }
        EXPECT_TRUE(testutil::connected(g));
    }
}

TEST(Generate, RejectsInvalidParams)
{
    EXPECT_THROW(generate_graph("planted_clique", {{"n", "4"}, {"K", "5"}}, 1), GraphError);
    EXPECT_THROW(generate_graph("no_such_kind", {{"n", "4"}}, 1), GraphError);
}

TEST(Generate, SmallFamiliesHaveExpectedShape)
{
    EXPECT_EQ(degrees(path_graph(4)), (std::vector<int>{1, 2, 2, 1}));
    EXPECT_EQ(cycle_graph(6).edge_count(), 6u);
    EXPECT_EQ(star_graph(8).deg(0), 8);
    EXPECT_EQ(random_tree(30, 3).edge_count(), 29u);
}

// Property: every generator output is symmetric, connected, port-consistent
// and reproducible from its seed.
TEST(Generate, PropertySymmetricConnectedReproducible)
{
    const char* specs[] = {"path:", "cycle:", "clique:", "star:", "tree:", "gnp:"};
    std::mt19937_64 rng(11);
    for (int i = 0; i < 120; ++i) {
        std::string kind = specs[i % 6];
        int n = 3 + static_cast<int>(rng() % 30);
        std::string spec = kind + std::to_string(n) + (kind == "gnp:" ? ",0.15" : "");
        uint64_t seed = rng();
        Graph g = generate_from_spec(spec, seed);
        ASSERT_TRUE(testutil::symmetric(g)) << spec;
        ASSERT_TRUE(testutil::connected(g)) << spec;
        for (int u = 0; u < g.n; ++u) {
            for (int p = 0; p < g.deg(u); ++p) {
                EXPECT_EQ(g.port_of(u, g.adj[u][p]), p);
            }
        }
        EXPECT_EQ(generate_from_spec(spec, seed), g) << spec;
    }
}

TEST(Union, SameGraphIsAllBoth)
{
    Graph g = union_graph(path_graph(3), path_graph(3));
    EXPECT_EQ(g.edge_count(), 2u);
    EXPECT_EQ(label_of(g, 0, 1), EdgeLabel::Both);
    EXPECT_EQ(label_of(g, 1, 2), EdgeLabel::Both);
}

TEST(Union, TwoPathsMakeATriangle)
{
    Graph a = make_graph(3, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    Graph b = make_graph(3, std::vector<std::pair<int, int>>{{0, 2}, {2, 1}});
    Graph g = union_graph(a, b);
    EXPECT_EQ(g.edge_count(), 3u);
    // Edge-by-edge set union as the oracle.
    auto ea = testutil::edge_set(a), eb = testutil::edge_set(b);
    for (auto [u, v] : testutil::edge_set(g)) {
        bool in0 = ea.count({u, v}) != 0, in1 = eb.count({u, v}) != 0;
        EdgeLabel want = in0 && in1 ? EdgeLabel::Both : (in0 ? EdgeLabel::G0 : EdgeLabel::G1);
        EXPECT_EQ(label_of(g, u, v), want) << u << "-" << v;
    }
    EXPECT_EQ(g.neighbors_in(0, 0), std::vector<int>{1});
    EXPECT_EQ(g.neighbors_in(0, 1), std::vector<int>{2});
}

TEST(Union, Errors)
{
    Graph a = make_graph(4, std::vector<std::pair<int, int>>{{0, 1}}, false);
    Graph b = make_graph(4, std::vector<std::pair<int, int>>{{2, 3}}, false);
    EXPECT_THROW(union_graph(a, b), GraphError);
    EXPECT_THROW(union_graph(path_graph(3), path_graph(4)), GraphError);
}

TEST(Permute, ImageHasPermutedEdges)
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 30; ++i) {
        Graph g = testutil::random_connected_graph(7, 0.3, rng);
        std::vector<int> pi(7);
        std::iota(pi.begin(), pi.end(), 0);
        std::shuffle(pi.begin(), pi.end(), rng);
        Graph h = permute_graph(g, pi);
        testutil::EdgeSet want;
        for (auto [u, v] : testutil::edge_set(g)) {
            want.insert({std::min(pi[u], pi[v]), std::max(pi[u], pi[v])});
        }
        EXPECT_EQ(testutil::edge_set(h), want);
    }
}
