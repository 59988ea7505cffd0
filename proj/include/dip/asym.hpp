#pragma once

#include "dip/compiler.hpp"
#include "dip/hashes.hpp"

#include <memory>

namespace dip {

// Constants of one Asym or GNI instance. The hashed set S is the set of
// relabelings of G (Asym) or of G0 and G1 (GNI); ell is the smallest with
// 2^ell >= 2n! (Asym) or 4n! (GNI).
struct AsymConfig {
    int n = 0;
    bool gni = false;
    GF2m gf;
    unsigned ell = 0;
    uint64_t W = 2;
    uint64_t threshold = 1;  // g_K(y) = 0 iff v < threshold

    // Relative to 2^ell: p = 2n!/2^ell as in the acceptance analysis.
    double p() const;
};

AsymConfig asym_config(int n, bool gni);

// Hash seeds and word-hash keys drawn by the nodes, indexed by node id.
struct AsymCoins {
    std::vector<LocalHashSeed> seeds;
    WordHashSeed key;
};

// The image rows of pi(G_b): row pi(u) holds {pi(v) : v in N_b(u)}.
std::vector<uint64_t> image_rows(const Graph& g, int which, const std::vector<int>& pi);

// Honest search: the first (b, pi) in lexicographic order with
// g_K(h(pi(G_b))) = 0^ell, or nullopt.
struct AsymWitness {
    int which = 0;
    std::vector<int> pi;
};
std::optional<AsymWitness> asym_search(const AsymConfig& cfg, const Graph& g, const AsymCoins& coins);

// Whether some H in S hashes to zero, by enumeration of all (b, pi).
bool asym_exists_zero(const AsymConfig& cfg, const Graph& g, const AsymCoins& coins);

// The inner public-coin protocol (V: seeds and keys, P: pi(u), the seed of
// position pi(u), and for GNI the graph bit) with its RAM verifier.
std::shared_ptr<InnerProtocol> asym_inner(const Graph& g, bool gni);
std::string asym_source(const AsymConfig& cfg);

// The dAMAM protocol: the inner protocol run through the RAM compiler.
std::shared_ptr<RamCompiledProtocol> asym_protocol(const Graph& g, bool gni);

// Parallel repetition: accept iff at least threshold * reps runs accepted.
bool threshold_verdict(size_t accepted, size_t reps, double threshold);

// Automorphism count by enumeration of all n! permutations.
uint64_t automorphism_count(const Graph& g);
// Number of distinct labeled graphs isomorphic to g: n! / |Aut(g)|.
uint64_t relabeling_count(const Graph& g);
bool isomorphic(const Graph& a, const Graph& b);

} // namespace dip
