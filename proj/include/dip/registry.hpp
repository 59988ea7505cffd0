#pragma once

#include "dip/engine.hpp"
#include "dip/graph.hpp"

#include <memory>
#include <string>
#include <vector>

namespace dip {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A protocol bound to one graph, with the provers it knows by name. The
// protocol is kept alive here; prover factories may hold references to it.
struct Instance {
    std::shared_ptr<Protocol> protocol;
    std::vector<std::string> provers;
    std::function<ProverFactory(const std::string&)> make_prover;

    ProverFactory prover(const std::string& name) const;
};

// Parameters by name (c, b, t, lambda, K, pi, ...), as strings.
struct ProtocolParams {
    Params values;
    // Node-indexed permutation, if a table was loaded.
    std::vector<int> pi;

    bool has(const std::string& k) const { return values.count(k) != 0; }
    int64_t get_int(const std::string& k, int64_t dflt) const;
    double get_double(const std::string& k, double dflt) const;
};

std::vector<std::string> protocol_names();
bool known_protocol(const std::string& name);
// Prover names of a protocol, without building an instance.
std::vector<std::string> prover_names(const std::string& protocol);

// Builds the protocol for g. Instance data (lists, values) comes from the
// node IDs and seed; `equal=0` or `dup=1` turn an instance into a no-instance
// where that makes sense. Throws ConfigError on unknown names or bad values.
Instance build_instance(const std::string& protocol, const Graph& g, const ProtocolParams& params, uint64_t seed);

// "n" then n distinct integers in [0, n).
std::vector<int> parse_permutation(const std::string& text, int n);

} // namespace dip
