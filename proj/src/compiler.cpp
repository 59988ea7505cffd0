#include "dip/compiler.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace dip {

unsigned RunGeometry::step_bits() const
{
    const Program& p = *program;
    return p.pc_bits() + (kRegisters + 1) * p.word_bits() + time_bits();
}

unsigned RunGeometry::final_bits() const
{
    return program->word_bits() + time_bits();
}

RamCodec RamCodec::for_run(const RunGeometry& g, unsigned alpha_bits, unsigned id_bits)
{
    RamCodec c;
    c.pc_bits = g.program->pc_bits();
    c.word_bits = g.program->word_bits();
    c.addr_bits = width_for(g.participants * g.seg);
    c.time_bits = g.time_bits();
    c.alpha_bits = alpha_bits;
    c.id_bits = id_bits;
    return c;
}

unsigned RamCodec::width() const
{
    unsigned mem = word_bits + addr_bits + time_bits;
    unsigned st = pc_bits + kRegisters * word_bits + time_bits;
    unsigned id = alpha_bits + id_bits;
    return 2 + std::max({mem, st, id});
}

Big RamCodec::mem(const Big& v, uint64_t a, uint64_t t) const
{
    TuplePacker p;
    p.add(v, word_bits).add(a, addr_bits).add(t, time_bits).add(uint64_t{0}, 2);
    return p.value();
}

Big RamCodec::state(const MachineState& s, uint64_t t) const
{
    TuplePacker p;
    p.add(s.pc, pc_bits);
    for (const auto& r : s.r) {
        p.add(r, word_bits);
    }
    p.add(t, time_bits).add(uint64_t{1}, 2);
    return p.value();
}

Big RamCodec::id(uint64_t alpha, uint64_t id) const
{
    TuplePacker p;
    p.add(alpha, alpha_bits).add(id, id_bits).add(uint64_t{2}, 2);
    return p.value();
}

void write_steps(BitWriter& w, const RunGeometry& g, const std::vector<StepRecord>& steps)
{
    const Program& p = *g.program;
    for (const auto& s : steps) {
        w.put(s.s.pc, p.pc_bits());
        for (const auto& r : s.s.r) {
            w.put_big(r, p.word_bits());
        }
        w.put_big(s.v_read, p.word_bits());
        w.put(s.t_read, g.time_bits());
    }
}

std::vector<StepRecord> read_steps(BitReader& r, const RunGeometry& g)
{
    const Program& p = *g.program;
    std::vector<StepRecord> out(g.k);
    for (auto& s : out) {
        s.s.pc = r.get(p.pc_bits());
        for (auto& x : s.s.r) {
            x = r.get_big(p.word_bits());
        }
        s.v_read = r.get_big(p.word_bits());
        s.t_read = r.get(g.time_bits());
    }
    return out;
}

void write_finals(BitWriter& w, const RunGeometry& g, const std::vector<FinalRead>& f)
{
    for (const auto& x : f) {
        w.put_big(x.v, g.program->word_bits());
        w.put(x.t, g.time_bits());
    }
}

std::vector<FinalRead> read_finals(BitReader& r, const RunGeometry& g)
{
    std::vector<FinalRead> out(g.seg);
    for (auto& x : out) {
        x.v = r.get_big(g.program->word_bits());
        x.t = r.get(g.time_bits());
    }
    return out;
}

bool ram_share_lists(const RunGeometry& g, const RamCodec& codec, const RunShare& share, Multiset& left,
                     Multiset& right)
{
    const Program& prog = *g.program;
    const uint64_t tau = g.tau();
    if (share.id >= g.participants || share.steps.size() != g.k || share.finals.size() != g.seg ||
        share.init.size() != g.seg) {
        return false;
    }
    const uint64_t base = share.id * g.seg;
    for (uint64_t w = 0; w < g.seg; ++w) {
        const auto& f = share.finals[w];
        if (!prog.word.contains(share.init[w]) || !prog.word.contains(f.v) || f.t > tau) {
            return false;
        }
        left.push_back(codec.mem(share.init[w], base + w, 0));
        right.push_back(codec.mem(f.v, base + w, f.t));
    }
    StepEffect e;
    for (uint64_t i = 0; i < g.k; ++i) {
        const uint64_t t = share.id * g.k + i + 1;
        const StepRecord& rec = share.steps[i];
        e = apply_step(prog, rec.s, rec.v_read);
        if (!e.ok) {
            return false;
        }
        if (e.memory) {
            if (rec.t_read >= t) {
                return false;
            }
            right.push_back(codec.mem(rec.v_read, e.addr, rec.t_read));
            left.push_back(codec.mem(e.v_write, e.addr, t));
        } else if (rec.v_read != 0 || rec.t_read != 0) {
            return false;
        }
        right.push_back(codec.state(rec.s, t));
        left.push_back(codec.state(e.next, t + 1));
    }
    if (share.id + 1 == g.participants) {
        const StepRecord& last = share.steps.back();
        if (!e.halt || last.s.r[prog.code[last.s.pc].a] == 0) {
            return false;
        }
        right.push_back(codec.state(e.next, tau + 1));
        left.push_back(codec.state(MachineState{}, 1));
    }
    return true;
}

std::vector<RunShare> split_run(const RunGeometry& g, const std::vector<Big>& memory, const MachineRun& run)
{
    std::vector<RunShare> out(g.participants);
    for (uint64_t id = 0; id < g.participants; ++id) {
        auto& s = out[id];
        s.id = id;
        for (uint64_t w = 0; w < g.seg; ++w) {
            uint64_t a = id * g.seg + w;
            s.init.push_back(a < memory.size() ? memory[a] : Big(0));
            s.finals.push_back({run.final_v[a], run.final_t[a]});
        }
        s.steps.assign(run.steps.begin() + static_cast<long>(id * g.k),
                       run.steps.begin() + static_cast<long>((id + 1) * g.k));
    }
    return out;
}

uint64_t InnerProtocol::segment() const
{
    uint64_t s = derived_words + scratch_words;
    for (unsigned w : words_per_msg) {
        s += w;
    }
    return s;
}

uint64_t InnerProtocol::offset(int j) const
{
    uint64_t s = derived_words;
    for (int i = 0; i < j; ++i) {
        s += words_per_msg[i];
    }
    return s;
}

std::vector<Big> assemble_memory(const InnerProtocol& inner, const std::vector<uint64_t>& node_of_id,
                                 const std::vector<std::vector<Big>>& derived, const std::vector<InnerLocal>& local)
{
    const uint64_t seg = inner.segment();
    std::vector<Big> mem(node_of_id.size() * seg, 0);
    for (size_t id = 0; id < node_of_id.size(); ++id) {
        uint64_t u = node_of_id[id];
        uint64_t a = id * seg;
        for (const auto& x : derived[u]) {
            mem[a++] = x;
        }
        for (size_t j = 0; j < inner.schedule.size(); ++j) {
            for (const auto& x : local[u].words[j]) {
                mem[a++] = x;
            }
        }
    }
    return mem;
}

namespace {

InnerLocal public_part(const InnerProtocol& inner, const InnerLocal& l)
{
    InnerLocal out;
    out.words.resize(inner.schedule.size());
    for (size_t j = 0; j < inner.schedule.size(); ++j) {
        if (inner.schedule[j] == Dir::ProverToNodes) {
            out.words[j] = l.words[j];
        }
    }
    return out;
}

} // namespace

std::vector<std::vector<Big>> derive_all(const InnerProtocol& inner, const Graph& g, const std::vector<InnerLocal>& local)
{
    std::vector<std::vector<Big>> out(g.n);
    for (int u = 0; u < g.n; ++u) {
        NodeView v{u, g.n, g.adj[u], g.labels[u], g.inputs[u]};
        std::vector<InnerLocal> nb;
        for (int w : g.adj[u]) {
            nb.push_back(public_part(inner, local[w]));
        }
        auto d = inner.derived(v, local[u], nb);
        out[u] = d ? *d : std::vector<Big>(inner.derived_words, 0);
    }
    return out;
}

std::vector<std::string> ram_strategy_names()
{
    return {"honest", "state-tamper", "stale-read", "forge-root"};
}

RamStrategy ram_strategy(const std::string& name)
{
    if (name == "honest") {
        return RamStrategy::Honest;
    }
    if (name == "state-tamper") {
        return RamStrategy::StateTamper;
    }
    if (name == "stale-read") {
        return RamStrategy::StaleRead;
    }
    if (name == "forge-root") {
        return RamStrategy::ForgeRoot;
    }
    throw std::invalid_argument("unknown ram strategy " + name);
}

RamCompiledProtocol::RamCompiledProtocol(std::shared_ptr<const InnerProtocol> inner, int n)
    : inner_(std::move(inner)), n_(n)
{
    const auto& sch = inner_->schedule;
    if (sch.empty() || sch.back() != Dir::ProverToNodes) {
        throw std::invalid_argument("inner protocol must end with a prover message");
    }
    for (size_t j = 0; j < sch.size(); ++j) {
        if (sch[j] == Dir::ProverToNodes && first_p_ < 0) {
            first_p_ = static_cast<int>(j);
        }
        if (sch[j] == Dir::NodesToProver && first_v_ < 0) {
            first_v_ = static_cast<int>(j);
        }
    }
    mode_ = sch[0] == Dir::ProverToNodes ? IdMode::Permutation : IdMode::AlphaOrder;
    uint64_t m = static_cast<uint64_t>(std::max(n_, 2));
    alpha_range_ = mode_ == IdMode::AlphaOrder ? m * m * m * m : 1;
    geo_.program = &inner_->program;
    geo_.participants = static_cast<uint64_t>(n_);
    geo_.k = (inner_->tau_bound + geo_.participants - 1) / geo_.participants;
    geo_.seg = inner_->segment();
    if (geo_.participants * geo_.seg != inner_->program.memory_size) {
        throw std::invalid_argument("program memory size must be n * segment");
    }
    codec_ = RamCodec::for_run(geo_, mode_ == IdMode::AlphaOrder ? width_for(alpha_range_) : 0,
                               width_for(static_cast<uint64_t>(n_)));
    Big bound = Big(1) << codec_.width();
    cfg_ = seteq_config_for(n_, bound);
}

std::vector<Dir> RamCompiledProtocol::schedule() const
{
    auto s = inner_->schedule;
    s.push_back(Dir::NodesToProver);
    s.push_back(Dir::ProverToNodes);
    return s;
}

Bits RamCompiledProtocol::node_message(int msg, const NodeView&, RandomTape& tape) const
{
    const int inner_msgs = static_cast<int>(inner_->schedule.size());
    if (msg >= inner_msgs) {
        return draw_seteq_coins(cfg_, tape);
    }
    Bits out;
    if (msg == first_v_ && mode_ == IdMode::AlphaOrder) {
        Bits b;
        tape.uniform(Big(alpha_range_), &b);
        out.append(b);
    }
    for (const auto& range : inner_->coin_range[msg]) {
        Bits b;
        tape.uniform(range, &b);
        out.append(b);
    }
    return out;
}

std::vector<Big> RamCompiledProtocol::read_coin_words(int j, BitReader& r) const
{
    std::vector<Big> out;
    for (const auto& range : inner_->coin_range[j]) {
        out.push_back(r.get_big(width_for(range)));
    }
    return out;
}

bool RamCompiledProtocol::parse(const NodeTranscript& tr, Parsed& out) const
{
    const int inner_msgs = static_cast<int>(inner_->schedule.size());
    const unsigned wb = inner_->program.word_bits();
    const unsigned idb = width_for(static_cast<uint64_t>(n_));
    out.local.words.assign(inner_msgs, {});
    for (int j = 0; j < inner_msgs; ++j) {
        BitReader r(tr.msgs[j]);
        if (inner_->schedule[j] == Dir::NodesToProver) {
            if (j == first_v_ && mode_ == IdMode::AlphaOrder) {
                out.alpha_ord = r.get(width_for(alpha_range_));
            }
            out.local.words[j] = read_coin_words(j, r);
        } else {
            if (j == first_p_) {
                out.id = r.get(idb);
                if (mode_ == IdMode::AlphaOrder) {
                    out.alpha_succ = r.get(width_for(alpha_range_));
                }
            }
            for (unsigned w = 0; w < inner_->words_per_msg[j]; ++w) {
                out.local.words[j].push_back(r.get_big(wb));
            }
            if (j == inner_msgs - 1) {
                out.steps = read_steps(r, geo_);
                out.finals = read_finals(r, geo_);
            }
        }
        if (!r.done()) {
            return false;
        }
    }
    BitReader cr(tr.msgs[inner_msgs]);
    if (!read_seteq_coins(cfg_, cr, out.coins)) {
        return false;
    }
    BitReader pr(tr.msgs[inner_msgs + 1]);
    out.proof = read_seteq_proof(cfg_, pr);
    return pr.done();
}

bool RamCompiledProtocol::node_lists(const Parsed& p, const std::vector<Big>& derived, Multiset& left,
                                     Multiset& right) const
{
    const uint64_t n = static_cast<uint64_t>(n_);
    if (p.id >= n || derived.size() != inner_->derived_words) {
        return false;
    }
    if (mode_ == IdMode::AlphaOrder && p.id + 1 < n && !(p.alpha_ord < p.alpha_succ)) {
        return false;
    }
    RunShare share;
    share.id = p.id;
    share.init = derived;
    for (size_t j = 0; j < inner_->schedule.size(); ++j) {
        if (p.local.words[j].size() != inner_->words_per_msg[j]) {
            return false;
        }
        for (const auto& x : p.local.words[j]) {
            if (!inner_->program.word.contains(x)) {
                return false;
            }
            share.init.push_back(x);
        }
    }
    share.init.resize(geo_.seg, 0);
    share.steps = p.steps;
    share.finals = p.finals;
    if (!ram_share_lists(geo_, codec_, share, left, right)) {
        return false;
    }
    left.push_back(codec_.id(mode_ == IdMode::AlphaOrder ? p.alpha_succ : 0, (p.id + 1) % n));
    right.push_back(codec_.id(mode_ == IdMode::AlphaOrder ? p.alpha_ord : 0, p.id));
    return true;
}

namespace {

struct CompiledCache {
    bool ok = false;
    RamCompiledProtocol::Parsed parsed;
};

CompiledCache& cache_of(const RamCompiledProtocol& proto, NodeTranscript& tr)
{
    if (!tr.cache) {
        auto c = std::make_shared<CompiledCache>();
        c->ok = proto.parse(tr, c->parsed);
        tr.cache = c;
    }
    return *std::static_pointer_cast<CompiledCache>(tr.cache);
}

} // namespace

std::vector<Packet> RamCompiledProtocol::node_exchange(int, const NodeView& v, NodeTranscript& tr, const Inbox&) const
{
    auto& c = cache_of(*this, tr);
    Bits proof = tr.msgs.back();
    // Public chunk words ride along so neighbors can derive their words.
    BitWriter chunk;
    for (size_t j = 0; j < inner_->schedule.size(); ++j) {
        if (inner_->schedule[j] == Dir::ProverToNodes) {
            for (const auto& x : c.parsed.local.words[j]) {
                chunk.put_big(x, inner_->program.word_bits());
            }
        }
    }
    auto out = tree_packets(v, c.ok ? c.parsed.proof.tree.parent_port : -1, proof);
    for (auto& pk : out) {
        pk.push_back(chunk.out());
    }
    return out;
}

bool RamCompiledProtocol::node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const
{
    auto& c = cache_of(*this, tr);
    if (!c.ok) {
        return false;
    }
    const Parsed& p = c.parsed;
    std::vector<SetEqProof> nbr(v.deg());
    std::vector<char> flags(v.deg(), 0);
    std::vector<InnerLocal> nlocal(v.deg());
    for (int q = 0; q < v.deg(); ++q) {
        const Packet& pk = inbox[0][q];
        if (pk.size() != 3 || pk[1].size() != 1) {
            return false;
        }
        BitReader r(pk[0]);
        nbr[q] = read_seteq_proof(cfg_, r);
        if (!r.done()) {
            return false;
        }
        flags[q] = pk[1][0];
        BitReader cr(pk[2]);
        nlocal[q].words.assign(inner_->schedule.size(), {});
        for (size_t j = 0; j < inner_->schedule.size(); ++j) {
            if (inner_->schedule[j] == Dir::ProverToNodes) {
                for (unsigned w = 0; w < inner_->words_per_msg[j]; ++w) {
                    nlocal[q].words[j].push_back(cr.get_big(inner_->program.word_bits()));
                }
            }
        }
        if (!cr.done()) {
            return false;
        }
    }
    auto derived = inner_->derived(v, p.local, nlocal);
    if (!derived) {
        return false;
    }
    Multiset left;
    Multiset right;
    if (!node_lists(p, *derived, left, right)) {
        return false;
    }
    return seteq_check(cfg_, v, p.coins, p.proof, nbr, flags, left, right);
}

Bits RamCompiledProtocol::encode_p(int j, const Parsed& p) const
{
    BitWriter w;
    if (j == first_p_) {
        w.put(p.id, width_for(static_cast<uint64_t>(n_)));
        if (mode_ == IdMode::AlphaOrder) {
            w.put(p.alpha_succ, width_for(alpha_range_));
        }
    }
    for (const auto& x : p.local.words[j]) {
        w.put_big(x, inner_->program.word_bits());
    }
    if (j == last_inner()) {
        write_steps(w, geo_, p.steps);
        write_finals(w, geo_, p.finals);
    }
    return w.take();
}

Bits RamCompiledProtocol::encode_seteq_proof(const SetEqProof& p) const
{
    BitWriter w;
    write_seteq_proof(cfg_, w, p);
    return w.take();
}

namespace {

// Finds a LOAD whose address was overwritten since an earlier write and
// replays the machine with that earlier (v, t) read instead. Prefers a
// replay that halts with output 1.
std::optional<MachineRun> stale_replay(const Program& prog, const std::vector<Big>& memory, uint64_t tau,
                                       const MachineRun& honest)
{
    std::vector<std::vector<std::pair<Big, uint64_t>>> hist(prog.memory_size);
    for (uint64_t a = 0; a < prog.memory_size; ++a) {
        hist[a].push_back({a < memory.size() ? memory[a] : Big(0), 0});
    }
    std::vector<ReadOverride> candidates;
    for (uint64_t i = 0; i < honest.steps.size(); ++i) {
        const auto& e = honest.effects[i];
        uint64_t t = i + 1;
        if (!e.memory) {
            continue;
        }
        const Instr& ins = prog.code[honest.steps[i].s.pc];
        const auto& h = hist[e.addr];
        if (ins.op == Op::LOAD && h.size() >= 2 && h[h.size() - 2].first != h.back().first) {
            candidates.push_back({t, h[h.size() - 2].first, h[h.size() - 2].second});
        }
        hist[e.addr].push_back({e.v_write, t});
    }
    std::optional<MachineRun> fallback;
    for (const auto& c : candidates) {
        try {
            MachineRun r = run_machine(prog, memory, tau, c);
            if (r.y) {
                return r;
            }
            if (!fallback) {
                fallback = std::move(r);
            }
        } catch (const RamError&) {
        }
    }
    return fallback;
}

class RamProver : public Prover {
  public:
    RamProver(std::shared_ptr<const RamCompiledProtocol> p, RamStrategy s) : p_(std::move(p)), strategy_(s) {}

    std::vector<Bits> respond(int msg, const ProverView& view) override
    {
        const auto& inner = p_->inner();
        const Graph& g = view.graph;
        const int n = g.n;
        const int inner_msgs = static_cast<int>(inner.schedule.size());
        if (parsed_.empty()) {
            parsed_.resize(n);
            for (auto& x : parsed_) {
                x.local.words.assign(inner_msgs, {});
            }
        }
        std::vector<Bits> out(n);
        if (msg < inner_msgs) {
            // Absorb every node message seen so far.
            for (int j = 0; j < msg; ++j) {
                if (inner.schedule[j] != Dir::NodesToProver) {
                    continue;
                }
                for (int u = 0; u < n; ++u) {
                    BitReader r(view.node_msgs[j][u]);
                    if (j == p_->first_v() && p_->id_mode() == IdMode::AlphaOrder) {
                        parsed_[u].alpha_ord = r.get(width_for(p_->alpha_range()));
                    }
                    parsed_[u].local.words[j] = p_->read_coin_words(j, r);
                }
            }
            if (msg == p_->first_p()) {
                assign_ids(n);
            }
            std::vector<InnerLocal> locals;
            for (const auto& x : parsed_) {
                locals.push_back(x.local);
            }
            auto chunks = inner.honest(msg, InnerProverState{g, id_of_, locals});
            for (int u = 0; u < n; ++u) {
                parsed_[u].local.words[msg] = chunks[u];
            }
            if (msg == p_->last_inner()) {
                build_trace(g);
            }
            for (int u = 0; u < n; ++u) {
                out[u] = p_->encode_p(msg, parsed_[u]);
            }
            return out;
        }
        const SetEqConfig& cfg = p_->seteq();
        auto coins = parse_all_coins(cfg, view.node_msgs[inner_msgs]);
        std::vector<Multiset> left(n);
        std::vector<Multiset> right(n);
        for (int u = 0; u < n; ++u) {
            p_->node_lists(parsed_[u], derived_[u], left[u], right[u]);
        }
        auto pr = seteq_prove(cfg, g, coins, left, right,
                              strategy_ == RamStrategy::ForgeRoot ? SetEqStrategy::ForgeRoot : SetEqStrategy::Honest);
        for (int u = 0; u < n; ++u) {
            out[u] = p_->encode_seteq_proof(pr[u]);
        }
        return out;
    }

  private:
    void assign_ids(int n)
    {
        std::vector<uint64_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        if (p_->id_mode() == IdMode::AlphaOrder) {
            std::stable_sort(order.begin(), order.end(),
                             [&](uint64_t a, uint64_t b) { return parsed_[a].alpha_ord < parsed_[b].alpha_ord; });
        }
        node_of_id_ = order;
        id_of_.assign(n, 0);
        for (int i = 0; i < n; ++i) {
            id_of_[order[i]] = static_cast<uint64_t>(i);
        }
        for (int u = 0; u < n; ++u) {
            parsed_[u].id = id_of_[u];
            uint64_t succ = node_of_id_[(id_of_[u] + 1) % static_cast<uint64_t>(n)];
            parsed_[u].alpha_succ = parsed_[succ].alpha_ord;
        }
    }

    void build_trace(const Graph& g)
    {
        const auto& inner = p_->inner();
        const auto& geo = p_->geometry();
        std::vector<InnerLocal> locals;
        for (const auto& x : parsed_) {
            locals.push_back(x.local);
        }
        derived_ = derive_all(inner, g, locals);
        auto memory = assemble_memory(inner, node_of_id_, derived_, locals);
        MachineRun run;
        try {
            run = run_machine(inner.program, memory, geo.tau());
        } catch (const RamError&) {
            // No valid trace exists; send an all-zero one.
            run.steps.assign(geo.tau(), StepRecord{});
            run.final_v.assign(inner.program.memory_size, 0);
            run.final_t.assign(inner.program.memory_size, 0);
        }
        if (strategy_ == RamStrategy::StaleRead && !run.effects.empty()) {
            if (auto r = stale_replay(inner.program, memory, geo.tau(), run)) {
                run = std::move(*r);
            }
        }
        if (strategy_ == RamStrategy::StateTamper && run.halted_after > 0) {
            for (uint64_t t = run.halted_after; t <= geo.tau(); ++t) {
                auto& s = run.steps[t - 1].s;
                s.r[inner.program.code[s.pc].a] = 1;
            }
        }
        auto shares = split_run(geo, memory, run);
        for (int u = 0; u < g.n; ++u) {
            const auto& sh = shares[id_of_[u]];
            parsed_[u].steps = sh.steps;
            parsed_[u].finals = sh.finals;
        }
    }

    std::shared_ptr<const RamCompiledProtocol> p_;
    RamStrategy strategy_;
    std::vector<RamCompiledProtocol::Parsed> parsed_;
    std::vector<uint64_t> id_of_;
    std::vector<uint64_t> node_of_id_;
    std::vector<std::vector<Big>> derived_;
};

} // namespace

ProverFactory ram_prover(std::shared_ptr<const RamCompiledProtocol> p, RamStrategy strategy)
{
    return [p, strategy](uint64_t) { return std::make_unique<RamProver>(p, strategy); };
}

std::string sum_to_k_source(int n, uint64_t seg, uint64_t K)
{
    std::ostringstream s;
    s << "# r1 walks the input words, the running sum lives at address 1\n"
      << "      LOADI r1 0\n"
      << "loop: LOAD r0 r1 0\n"
      << "      LOADI r2 0\n"
      << "      LOAD r3 r2 1\n"
      << "      ADD r3 r3 r0\n"
      << "      STORE r3 r2 1\n"
      << "      LOADI r2 " << seg << "\n"
      << "      ADD r1 r1 r2\n"
      << "      LOADI r2 " << static_cast<uint64_t>(n) * seg << "\n"
      << "      SUB r0 r2 r1\n"
      << "      JNZ r0 loop\n"
      << "      LOADI r2 0\n"
      << "      LOAD r3 r2 1\n"
      << "      LOADI r2 " << K << "\n"
      << "      SUB r0 r3 r2\n"
      << "      LOADI r1 1\n"
      << "      CMPLT r0 r0 r1\n"
      << "      HALT01 r0\n";
    return s.str();
}

std::shared_ptr<InnerProtocol> sum_to_k_inner(const std::vector<uint64_t>& inputs, uint64_t K)
{
    const int n = static_cast<int>(inputs.size());
    uint64_t top = std::max<uint64_t>(K, 1);
    for (uint64_t x : inputs) {
        top += x;
    }
    uint64_t m = static_cast<uint64_t>(std::max(n, 2));
    auto inner = std::make_shared<InnerProtocol>();
    inner->name = "sum-to-k";
    inner->schedule = {Dir::ProverToNodes};
    inner->word = Field(Big(next_prime_u64(std::max({m * m * m, 2 * top + 1, uint64_t{256}}))));
    inner->words_per_msg = {0};
    inner->coin_range = {{}};
    inner->derived_words = 1;
    inner->scratch_words = 1;
    inner->tau_bound = 10 * static_cast<uint64_t>(n) + 8;
    uint64_t seg = inner->segment();
    inner->program = assemble(sum_to_k_source(n, seg, K), inner->word, seg * static_cast<uint64_t>(n));
    inner->derived = [inputs](const NodeView& v, const InnerLocal&, const std::vector<InnerLocal>&) {
        return std::optional<std::vector<Big>>(std::vector<Big>{Big(inputs[v.id])});
    };
    inner->honest = [](int, const InnerProverState& st) {
        return std::vector<std::vector<Big>>(st.graph.n);
    };
    return inner;
}

} // namespace dip
