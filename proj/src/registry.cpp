#include "dip/registry.hpp"

#include "dip/asym.hpp"
#include "dip/blocks.hpp"
#include "dip/clique.hpp"
#include "dip/compiler.hpp"
#include "dip/fiatshamir.hpp"
#include "dip/lde.hpp"
#include "dip/loglog.hpp"
#include "dip/o1tree.hpp"
#include "dip/rng.hpp"
#include "dip/seteq.hpp"
#include "dip/tree.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace dip {

ProverFactory Instance::prover(const std::string& name) const
{
    if (std::find(provers.begin(), provers.end(), name) == provers.end()) {
        throw ConfigError("unknown prover '" + name + "' for " + protocol->name());
    }
    return make_prover(name);
}

int64_t ProtocolParams::get_int(const std::string& k, int64_t dflt) const
{
    auto it = values.find(k);
    if (it == values.end()) {
        return dflt;
    }
    try {
        size_t used = 0;
        int64_t v = std::stoll(it->second, &used);
        if (used != it->second.size()) {
            throw std::invalid_argument(k);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("parameter " + k + " is not an integer: " + it->second);
    }
}

double ProtocolParams::get_double(const std::string& k, double dflt) const
{
    auto it = values.find(k);
    if (it == values.end()) {
        return dflt;
    }
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ConfigError("parameter " + k + " is not a number: " + it->second);
    }
}

namespace {

const std::vector<std::string> kTreeProvers = {"honest", "cycle-forgery", "two-root"};
const std::vector<std::string> kAggregateProvers = {"honest", "inflate"};
const std::vector<std::string> kLdeProvers = {"honest", "lie"};
const std::vector<std::string> kFsProvers = {"honest", "grind"};

const std::map<std::string, std::vector<std::string>>& prover_table()
{
    static const std::map<std::string, std::vector<std::string>> t = {
        {"set-equality", seteq_strategy_names()},
        {"permutation", seteq_strategy_names()},
        {"distinctness", distinct_strategy_names()},
        {"dsym", seteq_strategy_names()},
        {"ram-compiled", ram_strategy_names()},
        {"asym", ram_strategy_names()},
        {"o1-tree", o1_strategy_names()},
        {"blocks", block_strategy_names()},
        {"clique", clique_strategy_names()},
        {"set-equality-loglog", loglog_strategy_names()},
        {"dsym-loglog", loglog_strategy_names()},
        {"sum-up-tree", loglog_strategy_names()},
        {"tree-labeling", kTreeProvers},
        {"aggregate", kAggregateProvers},
        {"lde", kLdeProvers},
        {"fs-set-equality", kFsProvers},
    };
    return t;
}

size_t index_of(const std::vector<std::string>& names, const std::string& s)
{
    return static_cast<size_t>(std::find(names.begin(), names.end(), s) - names.begin());
}

int positive(const ProtocolParams& p, const std::string& k, int64_t dflt)
{
    int64_t v = p.get_int(k, dflt);
    if (v < 1) {
        throw ConfigError("parameter " + k + " must be positive");
    }
    return static_cast<int>(v);
}

// One element per node in [1, n^c]; B is a seeded shuffle of A, with one
// entry bumped when equal=0.
std::pair<std::vector<Multiset>, std::vector<Multiset>> seteq_lists(const Graph& g, const ProtocolParams& p,
                                                                     uint64_t seed)
{
    int c = positive(p, "c", 1);
    Big bound = big_pow(static_cast<uint64_t>(std::max(g.n, 2)), static_cast<unsigned>(c));
    auto rng = make_rng(seed, 0x5e7);
    std::vector<Multiset> a(g.n), b(g.n);
    std::vector<Big> vals(g.n);
    for (int u = 0; u < g.n; ++u) {
        uint64_t cap = bound > Big(uint64_t{1} << 62) ? uint64_t{1} << 62 : static_cast<uint64_t>(bound);
        vals[u] = Big(1 + rng() % cap);
        a[u] = {vals[u]};
    }
    std::shuffle(vals.begin(), vals.end(), rng);
    for (int u = 0; u < g.n; ++u) {
        b[u] = {vals[u]};
    }
    if (p.get_int("equal", 1) == 0) {
        b[0][0] = b[0][0] == bound ? Big(b[0][0] - 1) : Big(b[0][0] + 1);
    }
    return {a, b};
}

// A permutation of 1..n, with one value copied over another when dup=1.
std::vector<uint64_t> perm_values(const Graph& g, const ProtocolParams& p, uint64_t seed)
{
    std::vector<uint64_t> v(g.n);
    std::iota(v.begin(), v.end(), 1);
    auto rng = make_rng(seed, 0x9e7);
    std::shuffle(v.begin(), v.end(), rng);
    if (p.get_int("dup", 0) != 0 && g.n > 1) {
        v[1] = v[0];
    }
    return v;
}

std::vector<int> pi_or_identity(const Graph& g, const ProtocolParams& p)
{
    if (!p.pi.empty()) {
        if (static_cast<int>(p.pi.size()) != g.n) {
            throw ConfigError("pi table size does not match the graph");
        }
        return p.pi;
    }
    std::vector<int> pi(g.n);
    std::iota(pi.begin(), pi.end(), 0);
    return pi;
}

// Node inputs u mod 4 and K their sum unless given.
std::pair<std::vector<uint64_t>, uint64_t> sum_values(const Graph& g, const ProtocolParams& p)
{
    std::vector<uint64_t> v(g.n);
    uint64_t total = 0;
    for (int u = 0; u < g.n; ++u) {
        v[u] = static_cast<uint64_t>(u % 4);
        total += v[u];
    }
    int64_t K = p.get_int("K", static_cast<int64_t>(total));
    if (K < 0) {
        throw ConfigError("parameter K must be non-negative");
    }
    return {v, static_cast<uint64_t>(K)};
}

Instance loglog_instance(std::shared_ptr<LoglogProtocol> proto)
{
    Instance inst;
    inst.protocol = proto;
    inst.provers = loglog_strategy_names();
    inst.make_prover = [proto](const std::string& s) { return loglog_prover(proto, loglog_strategy(s)); };
    return inst;
}

} // namespace

std::vector<std::string> protocol_names()
{
    std::vector<std::string> out;
    for (const auto& [k, v] : prover_table()) {
        out.push_back(k);
    }
    return out;
}

bool known_protocol(const std::string& name)
{
    return prover_table().count(name) != 0;
}

std::vector<std::string> prover_names(const std::string& protocol)
{
    auto it = prover_table().find(protocol);
    if (it == prover_table().end()) {
        throw ConfigError("unknown protocol '" + protocol + "'");
    }
    return it->second;
}

Instance build_instance(const std::string& name, const Graph& g, const ProtocolParams& params, uint64_t seed)
{
    Instance inst;
    inst.provers = prover_names(name);
    int t = positive(params, "t", 8);

    if (name == "set-equality" || name == "dsym" || name == "fs-set-equality") {
        std::shared_ptr<SetEqualityProtocol> p;
        if (name == "dsym") {
            p = std::make_shared<DSymLogProtocol>(g, pi_or_identity(g, params));
        } else {
            auto [a, b] = seteq_lists(g, params, seed);
            int c = positive(params, "c", 1);
            auto cfg = seteq_config_for(g.n, Big(big_pow(static_cast<uint64_t>(std::max(g.n, 2)), c) + 1));
            if (params.has("p")) {
                int64_t q = params.get_int("p", 0);
                if (q < 2 || !is_prime_u64(static_cast<uint64_t>(q))) {
                    throw ConfigError("parameter p must be a prime");
                }
                cfg = seteq_config(g.n, Field(Big(static_cast<uint64_t>(q))));
            }
            p = std::make_shared<SetEqualityProtocol>(a, b, cfg);
        }
        if (name != "fs-set-equality") {
            inst.protocol = p;
            inst.make_prover = [p](const std::string& s) { return seteq_prover(*p, seteq_strategy(s)); };
            return inst;
        }
        int lambda = positive(params, "lambda", 64);
        if (lambda > 256) {
            throw ConfigError("lambda must be at most 256");
        }
        uint64_t key = static_cast<uint64_t>(params.get_int("key", static_cast<int64_t>(seed & 0x7fffffff)));
        auto fs = std::make_shared<FiatShamirProtocol>(p, RandomOracle(key, static_cast<unsigned>(lambda)));
        int64_t q = params.get_int("q", 1 << 12);
        inst.protocol = fs;
        inst.make_prover = [p, fs, q](const std::string& s) {
            ProverFactory inner = seteq_prover(*p, SetEqStrategy::Honest);
            if (s == "grind") {
                return fs_grinding_prover(fs, inner, static_cast<uint64_t>(q));
            }
            return fs_prover(fs, inner);
        };
        return inst;
    }
    if (name == "permutation") {
        auto p = std::make_shared<PermutationProtocol>(perm_values(g, params, seed));
        inst.protocol = p;
        inst.make_prover = [p](const std::string& s) { return seteq_prover(*p, seteq_strategy(s)); };
        return inst;
    }
    if (name == "distinctness") {
        auto vals = perm_values(g, params, seed);
        auto p = std::make_shared<DistinctnessProtocol>(vals, static_cast<uint64_t>(g.n) + 1);
        inst.protocol = p;
        auto names = inst.provers;
        inst.make_prover = [p, names](const std::string& s) {
            return distinct_prover(*p, static_cast<DistinctStrategy>(index_of(names, s)));
        };
        return inst;
    }
    if (name == "ram-compiled" || name == "asym") {
        std::shared_ptr<RamCompiledProtocol> p;
        if (name == "asym") {
            if (g.n > 8) {
                throw ConfigError("asym enumerates n! relabelings; use n <= 8");
            }
            p = asym_protocol(g, params.get_int("gni", 0) != 0);
        } else {
            auto [vals, K] = sum_values(g, params);
            p = std::make_shared<RamCompiledProtocol>(sum_to_k_inner(vals, K), g.n);
        }
        inst.protocol = p;
        inst.make_prover = [p](const std::string& s) { return ram_prover(p, ram_strategy(s)); };
        return inst;
    }
    if (name == "o1-tree") {
        auto p = std::make_shared<O1TreeProtocol>(t);
        inst.protocol = p;
        inst.make_prover = [p, g](const std::string& s) { return o1_prover(*p, g, o1_strategy(s)); };
        return inst;
    }
    if (name == "blocks") {
        auto p = std::make_shared<BlockProtocol>(positive(params, "b", 3), t);
        inst.protocol = p;
        inst.make_prover = [p, g](const std::string& s) { return block_prover(*p, g, block_strategy(s)); };
        return inst;
    }
    if (name == "clique") {
        auto p = std::make_shared<CliqueProtocol>(positive(params, "K", 3), t);
        inst.protocol = p;
        inst.make_prover = [p, g](const std::string& s) { return clique_prover(*p, g, clique_strategy(s)); };
        return inst;
    }
    if (name == "set-equality-loglog") {
        auto [a, b] = seteq_lists(g, params, seed);
        return loglog_instance(
            LoglogProtocol::set_equality(a, b, static_cast<int>(params.get_int("b", 0)), t));
    }
    if (name == "dsym-loglog") {
        return loglog_instance(
            dsym_loglog(g, pi_or_identity(g, params), static_cast<int>(params.get_int("b", 0)), t));
    }
    if (name == "sum-up-tree") {
        auto [vals, K] = sum_values(g, params);
        return loglog_instance(sum_up_tree(vals, K, static_cast<int>(params.get_int("b", 0)), t));
    }
    if (name == "tree-labeling") {
        inst.protocol = std::make_shared<TreeLabelingProtocol>();
        inst.make_prover = [g](const std::string& s) {
            if (s == "cycle-forgery") {
                return tree_label_prover(cycle_forgery(g));
            }
            if (s == "two-root") {
                return tree_label_prover(two_root_forgery(g));
            }
            return honest_tree_prover(g);
        };
        return inst;
    }
    if (name == "aggregate") {
        auto [vals, K] = sum_values(g, params);
        std::vector<Big> bv(vals.begin(), vals.end());
        auto p = std::make_shared<AggregateProtocol>(bv, AggOp::Sum, Field(Big(2)), Big(K));
        inst.protocol = p;
        inst.make_prover = [p, g](const std::string& s) {
            if (s == "inflate") {
                int victim = 0;
                for (int u = 0; u < g.n; ++u) {
                    if (g.deg(u) > 1) {
                        victim = u;
                        break;
                    }
                }
                return inflating_aggregate_prover(*p, g, victim, Big(1));
            }
            return honest_aggregate_prover(*p, g);
        };
        return inst;
    }
    if (name == "lde") {
        auto lp = default_lde_params(16, g.n);
        auto rng = make_rng(seed, 0x1de);
        auto uniform = [&] { return lp.field.reduce(Big(rng()) * Big(rng())); };
        std::vector<Big> phi(lp.positions());
        for (auto& x : phi) {
            x = uniform();
        }
        std::vector<Big> z(lp.m);
        for (auto& x : z) {
            x = uniform();
        }
        auto p = std::make_shared<LdeProtocol>(lp, phi, g.n);
        inst.protocol = p;
        inst.make_prover = [p, g, z](const std::string& s) {
            return lde_prover(*p, g, z, s == "lie" ? Big(1) : Big(0));
        };
        return inst;
    }
    throw ConfigError("unknown protocol '" + name + "'");
}

std::vector<int> parse_permutation(const std::string& text, int n)
{
    std::istringstream in(text);
    int m = 0;
    if (!(in >> m) || m != n) {
        throw ConfigError("pi table: expected size " + std::to_string(n));
    }
    std::vector<int> pi(n);
    std::vector<char> seen(n, 0);
    for (int i = 0; i < n; ++i) {
        if (!(in >> pi[i]) || pi[i] < 0 || pi[i] >= n || seen[pi[i]]) {
            throw ConfigError("pi table: not a permutation of 0..n-1");
        }
        seen[pi[i]] = 1;
    }
    return pi;
}

} // namespace dip
