#include "dip/asym.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace dip {

double AsymConfig::p() const
{
    double factor = gni ? 4.0 : 2.0;
    return factor * static_cast<double>(factorial(n)) / static_cast<double>(uint64_t{1} << ell);
}

AsymConfig asym_config(int n, bool gni)
{
    if (n < 2 || n > 10) {
        throw std::invalid_argument("asym needs 2 <= n <= 10");
    }
    AsymConfig c;
    c.n = n;
    c.gni = gni;
    c.gf = GF2m(local_hash_bits(n));
    c.ell = set_size_ell(n, gni ? 4 : 2);
    c.W = word_modulus(c.ell);
    c.threshold = zero_threshold(c.W, c.ell);
    return c;
}

std::vector<uint64_t> image_rows(const Graph& g, int which, const std::vector<int>& pi)
{
    std::vector<uint64_t> rows(g.n, 0);
    for (int u = 0; u < g.n; ++u) {
        for (int v : g.neighbors_in(u, which)) {
            rows[pi[u]] |= uint64_t{1} << pi[v];
        }
    }
    return rows;
}

namespace {

uint64_t image_value(const AsymConfig& cfg, const Graph& g, const AsymCoins& coins, int which,
                     const std::vector<int>& pi)
{
    auto y = local_graph_hash(cfg.gf, coins.seeds, image_rows(g, which, pi), g.n);
    return word_hash_value(coins.key, y);
}

template <typename F>
bool for_each_candidate(const AsymConfig& cfg, int n, F&& f)
{
    for (int which = 0; which < (cfg.gni ? 2 : 1); ++which) {
        std::vector<int> pi(n);
        std::iota(pi.begin(), pi.end(), 0);
        do {
            if (f(which, pi)) {
                return true;
            }
        } while (std::next_permutation(pi.begin(), pi.end()));
    }
    return false;
}

} // namespace

std::optional<AsymWitness> asym_search(const AsymConfig& cfg, const Graph& g, const AsymCoins& coins)
{
    std::optional<AsymWitness> out;
    for_each_candidate(cfg, g.n, [&](int which, const std::vector<int>& pi) {
        if (image_value(cfg, g, coins, which, pi) < cfg.threshold) {
            out = AsymWitness{which, pi};
            return true;
        }
        return false;
    });
    return out;
}

bool asym_exists_zero(const AsymConfig& cfg, const Graph& g, const AsymCoins& coins)
{
    return asym_search(cfg, g, coins).has_value();
}

std::string asym_source(const AsymConfig& cfg)
{
    // Segment: U Y | CA CB CK CC | UP SA SB [BIT] | SEEDA SEEDB MARK YARR
    const uint64_t chunk = cfg.gni ? 4 : 3;
    const uint64_t seg = 6 + chunk + 4;
    const uint64_t sc = 6 + chunk;
    const uint64_t end = seg * static_cast<uint64_t>(cfg.n);
    std::ostringstream s;
    s << "# SEED[u] <- own seed, for every segment\n"
      << "      LOADI r1 0\n"
      << "l1:   LOAD r2 r1 0\n"
      << "      LOADI r3 " << seg << "\n"
      << "      MUL r2 r2 r3\n"
      << "      LOAD r0 r1 2\n"
      << "      STORE r0 r2 " << sc << "\n"
      << "      LOAD r0 r1 3\n"
      << "      STORE r0 r2 " << sc + 1 << "\n"
      << "      LOADI r0 " << seg << "\n"
      << "      ADD r1 r1 r0\n"
      << "      LOADI r0 " << end << "\n"
      << "      SUB r0 r0 r1\n"
      << "      JNZ r0 l1\n"
      << "# pi(u) in range and unused, claimed seed = SEED[pi(u)], Y[pi(u)] <- y\n"
      << "      LOADI r1 0\n"
      << "l2:   LOAD r2 r1 6\n"
      << "      LOADI r3 " << cfg.n << "\n"
      << "      CMPLT r0 r2 r3\n"
      << "      JNZ r0 ok\n"
      << "      LOADI r0 1\n"
      << "      JNZ r0 fail\n"
      << "ok:   LOADI r3 " << seg << "\n"
      << "      MUL r2 r2 r3\n"
      << "      LOAD r0 r2 " << sc + 2 << "\n"
      << "      JNZ r0 fail\n"
      << "      LOADI r0 1\n"
      << "      STORE r0 r2 " << sc + 2 << "\n"
      << "      LOAD r0 r1 7\n"
      << "      LOAD r3 r2 " << sc << "\n"
      << "      SUB r0 r0 r3\n"
      << "      JNZ r0 fail\n"
      << "      LOAD r0 r1 8\n"
      << "      LOAD r3 r2 " << sc + 1 << "\n"
      << "      SUB r0 r0 r3\n"
      << "      JNZ r0 fail\n"
      << "      LOAD r0 r1 1\n"
      << "      STORE r0 r2 " << sc + 3 << "\n"
      << "      LOADI r0 " << seg << "\n"
      << "      ADD r1 r1 r0\n"
      << "      LOADI r0 " << end << "\n"
      << "      SUB r0 r0 r1\n"
      << "      JNZ r0 l2\n"
      << "# v = sum c_u + k_u * Y[u] mod W\n"
      << "      LOADI r1 0\n"
      << "      LOADI r2 0\n"
      << "l3:   LOAD r0 r1 5\n"
      << "      ADD r2 r2 r0\n"
      << "      LOAD r0 r1 0\n"
      << "      LOADI r3 " << seg << "\n"
      << "      MUL r0 r0 r3\n"
      << "      LOAD r0 r0 " << sc + 3 << "\n"
      << "      LOAD r3 r1 4\n"
      << "      MUL r0 r0 r3\n"
      << "      ADD r2 r2 r0\n"
      << "      LOADI r0 " << seg << "\n"
      << "      ADD r1 r1 r0\n"
      << "      LOADI r0 " << end << "\n"
      << "      SUB r0 r0 r1\n"
      << "      JNZ r0 l3\n"
      << "      LOADI r3 " << cfg.threshold << "\n"
      << "      CMPLT r0 r2 r3\n"
      << "      HALT01 r0\n"
      << "fail: LOADI r0 0\n"
      << "      HALT01 r0\n";
    return s.str();
}

std::shared_ptr<InnerProtocol> asym_inner(const Graph& g, bool gni)
{
    const AsymConfig cfg = asym_config(g.n, gni);
    auto inner = std::make_shared<InnerProtocol>();
    inner->name = gni ? "gni" : "asym";
    inner->schedule = {Dir::NodesToProver, Dir::ProverToNodes};
    inner->word = Field(Big(cfg.W));
    const unsigned chunk = gni ? 4 : 3;
    inner->words_per_msg = {4, chunk};
    const Big hs(cfg.gf.size());
    inner->coin_range = {{hs, hs, Big(cfg.W), Big(cfg.W)}, {}};
    inner->derived_words = 2;
    inner->scratch_words = 4;
    inner->tau_bound = 52 * static_cast<uint64_t>(g.n) + 16;
    inner->program = assemble(asym_source(cfg), inner->word, inner->segment() * static_cast<uint64_t>(g.n));

    // y = h_sigma(row pi(u) of pi(G_b)), from the neighbors' pi values.
    inner->derived = [cfg](const NodeView& v, const InnerLocal& own,
                           const std::vector<InnerLocal>& nbr) -> std::optional<std::vector<Big>> {
        const auto& mine = own.words[1];
        if (mine[1] >= cfg.gf.size() || mine[2] >= cfg.gf.size()) {
            return std::nullopt;
        }
        int which = 0;
        if (cfg.gni) {
            if (mine[3] > 1) {
                return std::nullopt;
            }
            which = static_cast<int>(mine[3]);
        }
        uint64_t row = 0;
        for (int q = 0; q < v.deg(); ++q) {
            const auto& theirs = nbr[q].words[1];
            if (cfg.gni && theirs[3] != mine[3]) {
                return std::nullopt;
            }
            bool in_graph = (static_cast<int>(v.labels[q]) >> which) & 1;
            if (in_graph && theirs[0] < static_cast<unsigned>(cfg.n)) {
                row |= uint64_t{1} << static_cast<uint64_t>(theirs[0]);
            }
        }
        LocalHashSeed sigma{static_cast<uint64_t>(mine[1]), static_cast<uint64_t>(mine[2])};
        uint64_t y = local_hash(cfg.gf, sigma, row_words(row, cfg.n, cfg.gf.degree()));
        return std::vector<Big>{Big(v.id), Big(y)};
    };

    inner->honest = [cfg](int j, const InnerProverState& st) {
        const int n = st.graph.n;
        std::vector<std::vector<Big>> out(n);
        if (j != 1) {
            return out;
        }
        AsymCoins coins;
        coins.key.W = cfg.W;
        for (int u = 0; u < n; ++u) {
            const auto& w = st.local[u].words[0];
            coins.seeds.push_back({static_cast<uint64_t>(w[0]), static_cast<uint64_t>(w[1])});
            coins.key.k.push_back(static_cast<uint64_t>(w[2]));
            coins.key.c.push_back(static_cast<uint64_t>(w[3]));
        }
        auto wit = asym_search(cfg, st.graph, coins);
        for (int u = 0; u < n; ++u) {
            if (!wit) {
                // No witness: an out-of-range image the RAM verifier rejects.
                out[u] = {Big(n), 0, 0};
            } else {
                int img = wit->pi[u];
                out[u] = {Big(img), Big(coins.seeds[img].a), Big(coins.seeds[img].b)};
            }
            if (cfg.gni) {
                out[u].push_back(Big(wit ? wit->which : 0));
            }
        }
        return out;
    };
    return inner;
}

std::shared_ptr<RamCompiledProtocol> asym_protocol(const Graph& g, bool gni)
{
    return std::make_shared<RamCompiledProtocol>(asym_inner(g, gni), g.n);
}

bool threshold_verdict(size_t accepted, size_t reps, double threshold)
{
    return static_cast<double>(accepted) >= threshold * static_cast<double>(reps);
}

uint64_t automorphism_count(const Graph& g)
{
    auto rows = adjacency_rows(g);
    std::vector<int> pi(g.n);
    std::iota(pi.begin(), pi.end(), 0);
    uint64_t count = 0;
    do {
        bool ok = true;
        for (int u = 0; u < g.n && ok; ++u) {
            for (int v : g.adj[u]) {
                if (!((rows[pi[u]] >> pi[v]) & 1)) {
                    ok = false;
                    break;
                }
            }
        }
        count += ok ? 1 : 0;
    } while (std::next_permutation(pi.begin(), pi.end()));
    return count;
}

uint64_t relabeling_count(const Graph& g)
{
    return factorial(g.n) / automorphism_count(g);
}

bool isomorphic(const Graph& a, const Graph& b)
{
    if (a.n != b.n || a.edge_count() != b.edge_count()) {
        return false;
    }
    auto rows = adjacency_rows(b);
    std::vector<int> pi(a.n);
    std::iota(pi.begin(), pi.end(), 0);
    do {
        bool ok = true;
        for (int u = 0; u < a.n && ok; ++u) {
            for (int v : a.adj[u]) {
                if (!((rows[pi[u]] >> pi[v]) & 1)) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) {
            return true;
        }
    } while (std::next_permutation(pi.begin(), pi.end()));
    return false;
}

} // namespace dip
