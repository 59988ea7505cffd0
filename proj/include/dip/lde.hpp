#pragma once

#include "dip/tree.hpp"

#include <vector>

namespace dip {

// H = {0, ..., h-1} inside a prime field F; positions of H^m are indexed
// little-endian: x = sum_j x_j h^j.
struct LdeParams {
    Field field;
    uint64_t h = 2;
    unsigned m = 1;
    uint64_t positions() const;
};

// |H| = next power of two >= log2(#positions), m = ceil(log_|H| #positions),
// F the first prime above |H|^2 * m * n.
LdeParams default_lde_params(uint64_t positions, int n);

std::vector<uint64_t> grid_point(const LdeParams& p, uint64_t index);
// L_x(z) = prod_{y in H, y != x} (z - y) / (x - y).
Big lagrange_basis(const LdeParams& p, uint64_t x, const Big& z);
// tau_x(z) = prod_j L_{x_j}(z_j).
Big tau_hat(const LdeParams& p, const std::vector<uint64_t>& x, const std::vector<Big>& z);
// sum_x tau_x(z) phi(x), phi indexed by grid position.
Big lde_eval(const LdeParams& p, const std::vector<Big>& phi, const std::vector<Big>& z);

// Node u owns positions i with i mod n == u. The prover announces z and v
// and sums S_u = sum_{x in X_u} tau_x(z) phi(x) up the tree; the root checks
// the total against v. Neighbors compare z and v.
class LdeProtocol : public Protocol {
  public:
    LdeProtocol(LdeParams params, std::vector<Big> phi, int n);

    std::string name() const override { return "lde-eval"; }
    std::vector<Dir> schedule() const override { return {Dir::ProverToNodes}; }
    std::vector<Packet> node_exchange(int step, const NodeView& v, NodeTranscript& tr,
                                      const Inbox& inbox) const override;
    bool node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const override;

    const LdeParams& params() const { return params_; }
    // The node's own share S_u.
    Big local_share(int u, const std::vector<Big>& z) const;
    Bits encode(int n, const TreeLabel& l, const std::vector<Big>& z, const Big& v, const Big& x) const;
    // Reads v back from a node's message.
    Big claimed_value(int n, const Bits& msg) const;

  private:
    LdeParams params_;
    std::vector<Big> phi_;
    int n_;
};

// The honest prover for a point z; `lie` is added to every announced v and
// to the root aggregate, as a consistent-looking forgery.
ProverFactory lde_prover(const LdeProtocol& p, const Graph& g, std::vector<Big> z, const Big& lie = 0);

} // namespace dip
