#include "dip/field.hpp"
#include "dip/seteq.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace dip;

namespace {

bool trial_division_prime(uint64_t x)
{
    if (x < 2) {
        return false;
    }
    for (uint64_t d = 2; d * d <= x; ++d) {
        if (x % d == 0) {
            return false;
        }
    }
    return true;
}

std::vector<Multiset> lists(const std::vector<std::vector<uint64_t>>& v)
{
    std::vector<Multiset> out;
    for (const auto& row : v) {
        Multiset m;
        for (auto x : row) {
            m.push_back(Big(x));
        }
        out.push_back(m);
    }
    return out;
}

std::vector<Multiset> singletons(const std::vector<uint64_t>& v)
{
    std::vector<std::vector<uint64_t>> rows;
    for (auto x : v) {
        rows.push_back({x});
    }
    return lists(rows);
}

// Roots in F_p of prod(a - x) - prod(b - x), by evaluating every x.
uint64_t root_count(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b, uint64_t p)
{
    uint64_t roots = 0;
    for (uint64_t x = 0; x < p; ++x) {
        unsigned __int128 pa = 1, pb = 1;
        for (auto v : a) {
            pa = pa * ((v % p + p - x) % p) % p;
        }
        for (auto v : b) {
            pb = pb * ((v % p + p - x) % p) % p;
        }
        roots += pa == pb ? 1 : 0;
    }
    return roots;
}

// All multisets over {1..4} of size <= 4, as sorted vectors.
std::vector<std::vector<uint64_t>> small_multisets()
{
    std::vector<std::vector<uint64_t>> out{{}};
    for (size_t i = 0; i < out.size(); ++i) {
        if (out[i].size() == 4) {
            continue;
        }
        uint64_t from = out[i].empty() ? 1 : out[i].back();
        for (uint64_t x = from; x <= 4; ++x) {
            auto m = out[i];
            m.push_back(x);
            out.push_back(m);
        }
    }
    return out;
}

std::vector<uint64_t> flatten(const std::vector<Multiset>& l)
{
    std::vector<uint64_t> out;
    for (const auto& m : l) {
        for (const auto& x : m) {
            out.push_back(static_cast<uint64_t>(x));
        }
    }
    return out;
}

} // namespace

TEST(Field, ArithmeticMatchesModularIntegers)
{
    std::mt19937_64 rng(1);
    for (uint64_t p : {2ULL, 3ULL, 101ULL, 65537ULL, 1000000007ULL, 2305843009213693951ULL}) {
        Field f{Big(p)};
        for (int i = 0; i < 300; ++i) {
            uint64_t a = rng() % p, b = rng() % p;
            unsigned __int128 A = a, B = b;
            EXPECT_EQ(f.add(Big(a), Big(b)), Big(static_cast<uint64_t>((A + B) % p)));
            EXPECT_EQ(f.sub(Big(a), Big(b)), Big(static_cast<uint64_t>((A + p - B) % p)));
            EXPECT_EQ(f.mul(Big(a), Big(b)), Big(static_cast<uint64_t>(A * B % p)));
            if (a != 0) {
                EXPECT_EQ(f.mul(f.inv(Big(a)), Big(a)), Big(1));
            }
        }
    }
    // A modulus above 2^64 takes the wide path.
    Big big = next_prime(Big(1) << 100);
    Field f(big);
    Big a = (Big(rng()) << 64 | Big(rng())) % big;
    EXPECT_EQ(f.mul(a, f.inv(a)), Big(1));
    EXPECT_EQ(f.pow(a, big - 1), Big(1));
}

TEST(Field, PrimalityAgreesWithTrialDivision)
{
    for (uint64_t x = 0; x < 5000; ++x) {
        EXPECT_EQ(is_prime_u64(x), trial_division_prime(x)) << x;
    }
    for (uint64_t x = 0; x < 3000; x += 7) {
        uint64_t q = next_prime_u64(x);
        EXPECT_TRUE(trial_division_prime(q));
        for (uint64_t y = x; y < q; ++y) {
            EXPECT_FALSE(trial_division_prime(y));
        }
    }
}

TEST(Field, IdentityFieldIsLargeEnough)
{
    for (uint64_t n : {2u, 4u, 8u, 16u, 64u}) {
        for (uint64_t bound : {n, n * n, n * n * n}) {
            unsigned c = element_exponent(n, Big(bound));
            EXPECT_GE(big_pow(n, c), Big(bound));
            Field f = identity_test_field(n, Big(bound));
            EXPECT_GE(f.modulus(), big_pow(n, c + 3));
            EXPECT_TRUE(is_prime(f.modulus()));
        }
    }
}

// The difference polynomial vanishes identically iff the multisets agree,
// for every pair of multisets of size <= 4 over {1..4}.
TEST(SetEquality, ExhaustiveIdentityOverSmallField)
{
    Field f{Big(97)};
    auto all = small_multisets();
    ASSERT_EQ(all.size(), 70u);
    for (const auto& a : all) {
        for (const auto& b : all) {
            Multiset ma(a.begin(), a.end()), mb(b.begin(), b.end());
            bool zero = true;
            for (uint64_t x = 0; x < 97 && zero; ++x) {
                zero = list_product(f, ma, Big(x)) == list_product(f, mb, Big(x));
            }
            EXPECT_EQ(zero, a == b);
        }
    }
}

TEST(SetEquality, EqualListsComplete)
{
    for (int n : {4, 8, 16}) {
        Graph g = gnp_graph(n, 0.3, static_cast<uint64_t>(n));
        std::vector<uint64_t> a(n), b(n);
        std::iota(a.begin(), a.end(), 1);
        std::iota(b.rbegin(), b.rend(), 1);
        SetEqualityProtocol p(singletons(a), singletons(b));
        auto s = monte_carlo(p, g, seteq_prover(p, SetEqStrategy::Honest), 2000, 3);
        EXPECT_GE(s.accept_rate, 1.0 - 1.0 / (2.0 * n)) << n;
    }
}

TEST(SetEquality, OneChangedElementAtNFour)
{
    Graph g = path_graph(4);
    auto A = singletons({1, 2, 3, 4});
    auto B = singletons({1, 2, 3, 5});
    SetEqualityProtocol p(A, B);
    uint64_t q = static_cast<uint64_t>(p.config().field.modulus());
    ASSERT_GE(q, 256u);
    uint64_t roots = root_count({1, 2, 3, 4}, {1, 2, 3, 5}, q);
    // f = (1-x)(2-x)(3-x)((4-x) - (5-x)) vanishes exactly at the shared
    // elements.
    EXPECT_EQ(roots, 3u);
    for (const auto& st : seteq_strategy_names()) {
        auto s = monte_carlo(p, g, seteq_prover(p, seteq_strategy(st)), 1000, 9);
        EXPECT_LE(s.accept_rate, 0.02) << st;
    }
}

TEST(SetEquality, MultiplicityMatters)
{
    Graph g = path_graph(3);
    SetEqualityProtocol p(singletons({1, 1, 2}), singletons({1, 2, 2}));
    uint64_t q = static_cast<uint64_t>(p.config().field.modulus());
    uint64_t roots = root_count({1, 1, 2}, {1, 2, 2}, q);
    EXPECT_LE(roots, 3u);
    // At n = 3 the field is small (p >= 81), so the bound is roots/p.
    double bound = static_cast<double>(roots) / static_cast<double>(q);
    for (const auto& st : seteq_strategy_names()) {
        auto s = monte_carlo(p, g, seteq_prover(p, seteq_strategy(st)), 1000, 10);
        EXPECT_LE(s.accept_rate, bound + testutil::three_sigma(bound, 1000)) << st;
    }
}

// Soundness against every registered adversary at n = 8 and 16, against the
// root-count bound plus the collision slack.
TEST(SetEquality, SoundnessWithinBound)
{
    std::mt19937_64 rng(12);
    for (int n : {8, 16}) {
        Graph g = testutil::random_connected_graph(n, 0.2, rng);
        std::vector<std::vector<uint64_t>> a(n), b(n);
        for (int u = 0; u < n; ++u) {
            for (int k = 0; k < 2; ++k) {
                a[u].push_back(1 + rng() % static_cast<uint64_t>(n));
            }
        }
        b = a;
        std::shuffle(b.begin(), b.end(), rng);
        b[0][0] = b[0][0] % static_cast<uint64_t>(n) + 1;
        SetEqualityProtocol p(lists(a), lists(b));
        uint64_t q = static_cast<uint64_t>(p.config().field.modulus());
        double ell = 2;
        double bound = n * ell / static_cast<double>(q) + 1.0 / (2.0 * n);
        for (const auto& st : seteq_strategy_names()) {
            auto s = monte_carlo(p, g, seteq_prover(p, seteq_strategy(st)), 2000, rng());
            EXPECT_LE(s.accept_rate, bound + testutil::three_sigma(bound, 2000)) << n << " " << st;
        }
    }
}

// On any accepted run, exactly one node drew the announced alpha and its s is
// the announced s.
TEST(SetEquality, PropertyAcceptedElectionIsUnique)
{
    std::mt19937_64 rng(2);
    size_t checked = 0;
    for (int i = 0; i < 200; ++i) {
        int n = 2 + static_cast<int>(rng() % 8);
        Graph g = testutil::random_connected_graph(n, 0.3, rng);
        std::vector<uint64_t> v(n);
        for (auto& x : v) {
            x = 1 + rng() % 3;
        }
        auto w = v;
        std::shuffle(w.begin(), w.end(), rng);
        SetEqualityProtocol p(singletons(v), singletons(w));
        auto names = seteq_strategy_names();
        auto run = run_protocol(p, g, seteq_prover(p, seteq_strategy(names[i % names.size()])), rng());
        if (!run.accept) {
            continue;
        }
        ++checked;
        auto coins = parse_all_coins(p.config(), run.messages[0]);
        BitReader r(run.messages[1][0]);
        auto proof = read_seteq_proof(p.config(), r);
        int winners = 0;
        for (int u = 0; u < n; ++u) {
            if (coins[u].alpha == proof.alpha) {
                ++winners;
                EXPECT_EQ(coins[u].s, proof.s);
            }
        }
        EXPECT_EQ(winners, 1);
    }
    EXPECT_GT(checked, 100u);
}

TEST(SetEquality, BandwidthPerRoundWithinPinnedConstant)
{
    // Tree label, alpha (3 log n each), and s, A, B, Q: about 4.4 field
    // widths per node per round.
    const double C = 4.5;
    for (int n : {2, 8, 64, 256, 1024}) {
        Graph g = random_tree(n, 7);
        std::vector<uint64_t> v(n);
        std::iota(v.begin(), v.end(), 1);
        SetEqualityProtocol p(singletons(v), singletons(v));
        auto run = run_protocol(p, g, seteq_prover(p, SetEqStrategy::Honest), 1);
        double logp = std::ceil(std::log2(static_cast<double>(p.config().field.modulus())));
        EXPECT_LE(static_cast<double>(run.max_bits_per_node_per_round()), C * logp) << n;
    }
}

TEST(Permutation, Examples)
{
    Graph tri = cycle_graph(3);
    // Completeness at n = 3 is 1 - 1/(2n).
    const double complete = 1.0 - 1.0 / 6.0;
    PermutationProtocol yes({2, 3, 1});
    EXPECT_GE(monte_carlo(yes, tri, seteq_prover(yes, SetEqStrategy::Honest), 500, 1).accept_rate, complete);
    PermutationProtocol no({1, 1, 3});
    for (const auto& st : seteq_strategy_names()) {
        EXPECT_LE(monte_carlo(no, tri, seteq_prover(no, seteq_strategy(st)), 500, 2).accept_rate, 0.02) << st;
    }
    PermutationProtocol one({1});
    Graph single = make_graph(1, std::vector<std::pair<int, int>>{});
    EXPECT_TRUE(run_protocol(one, single, seteq_prover(one, SetEqStrategy::Honest), 1).accept);
    // Out of range values fail the local check outright.
    PermutationProtocol range({1, 2, 4});
    EXPECT_FALSE(run_protocol(range, tri, seteq_prover(range, SetEqStrategy::Honest), 1).accept);
}

TEST(Distinctness, Examples)
{
    Graph tri = cycle_graph(3);
    const double complete = 1.0 - 1.0 / 6.0;
    DistinctnessProtocol yes({5, 9, 7}, 10);
    EXPECT_GE(monte_carlo(yes, tri, distinct_prover(yes, DistinctStrategy::Honest), 500, 1).accept_rate, complete);
    DistinctnessProtocol no({5, 5, 7}, 10);
    auto names = distinct_strategy_names();
    for (size_t k = 0; k < names.size(); ++k) {
        auto s = monte_carlo(no, tri, distinct_prover(no, static_cast<DistinctStrategy>(k)), 1000, 3);
        EXPECT_LE(s.accept_rate, 0.02) << names[k];
    }
    Graph single = make_graph(1, std::vector<std::pair<int, int>>{});
    DistinctnessProtocol one({3}, 10);
    EXPECT_TRUE(run_protocol(one, single, distinct_prover(one, DistinctStrategy::Honest), 1).accept);
}

// Distinct inputs accept; duplicates reject under every strategy.
TEST(Distinctness, PropertyVerdictFollowsDistinctness)
{
    std::mt19937_64 rng(4);
    auto names = distinct_strategy_names();
    for (int i = 0; i < 40; ++i) {
        int n = 2 + static_cast<int>(rng() % 10);
        Graph g = testutil::random_connected_graph(n, 0.3, rng);
        std::vector<uint64_t> v(n);
        for (auto& x : v) {
            x = rng() % 40;
        }
        std::map<uint64_t, int> count;
        for (auto x : v) {
            ++count[x];
        }
        bool distinct = count.size() == v.size();
        DistinctnessProtocol p(v, 40);
        if (distinct) {
            auto s = monte_carlo(p, g, distinct_prover(p, DistinctStrategy::Honest), 200, rng());
            double complete = 1.0 - 1.0 / (2.0 * n);
            EXPECT_GE(s.accept_rate, complete - testutil::three_sigma(complete, 200)) << n;
        } else {
            for (size_t k = 0; k < names.size(); ++k) {
                auto s = monte_carlo(p, g, distinct_prover(p, static_cast<DistinctStrategy>(k)), 50, rng());
                EXPECT_LE(s.accept_rate, 0.06) << names[k];
            }
        }
    }
}

TEST(DSym, Examples)
{
    Graph c4 = cycle_graph(4);
    DSymLogProtocol rot(c4, {1, 2, 3, 0});
    EXPECT_GE(monte_carlo(rot, c4, seteq_prover(rot, SetEqStrategy::Honest), 500, 1).accept_rate, 1.0 - 1.0 / 8.0);
    Graph p3 = path_graph(3);
    DSymLogProtocol swap(p3, {2, 1, 0});
    EXPECT_GE(monte_carlo(swap, p3, seteq_prover(swap, SetEqStrategy::Honest), 500, 2).accept_rate, 1.0 - 1.0 / 6.0);
    DSymLogProtocol three(p3, {1, 2, 0});
    for (const auto& st : seteq_strategy_names()) {
        EXPECT_LE(monte_carlo(three, p3, seteq_prover(three, seteq_strategy(st)), 500, 3).accept_rate, 0.02) << st;
    }
}

// Edge lists: A holds each edge once; B is its image under pi. Equal as
// multisets iff pi is an automorphism (brute-force oracle).
TEST(DSym, PropertyListsMatchAutomorphismOracle)
{
    std::mt19937_64 rng(6);
    for (int i = 0; i < 60; ++i) {
        int n = 3 + static_cast<int>(rng() % 5);
        Graph g = testutil::random_connected_graph(n, 0.4, rng);
        std::vector<int> pi(n);
        std::iota(pi.begin(), pi.end(), 0);
        if (i % 3 != 0) {
            std::shuffle(pi.begin(), pi.end(), rng);
        }
        std::vector<Multiset> a(n), b(n);
        for (int u = 0; u < n; ++u) {
            a[u] = edge_list_of(g, u);
            b[u] = image_edge_list_of(g, pi, u);
        }
        auto fa = flatten(a), fb = flatten(b);
        EXPECT_EQ(fa.size(), g.edge_count());
        std::sort(fa.begin(), fa.end());
        std::sort(fb.begin(), fb.end());
        EXPECT_EQ(fa == fb, testutil::is_automorphism(g, pi));
    }
}
