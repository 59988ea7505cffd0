#include "dip/loglog.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace dip {

namespace {

constexpr int HOME = 0;
constexpr int PARENT = 1;

std::string substitute(std::string text, const std::vector<std::pair<std::string, std::string>>& subs)
{
    for (const auto& [from, to] : subs) {
        size_t pos = 0;
        while ((pos = text.find(from, pos)) != std::string::npos) {
            text.replace(pos, from.size(), to);
            pos += to.size();
        }
    }
    return text;
}

// Pass 1 adds every participant's shard words into the accumulators of its
// block representative (the participant KEY). Pass 2 folds the own elements
// of X's holders and the accumulated A (B) of each child block into GPA
// (GPB), checking that each child block shards the same s. The run accepts
// when X's accumulated A, B match, and for the top when A = B (A = K).
const char* kSetEqSource = R"(
      LOADI r0 1
      LOADI r1 0
      STORE r0 r1 @GPA
      STORE r0 r1 @GPB
p1:   LOAD r2 r1 @KEY
      LOADI r3 @SEG
      MUL r2 r2 r3
      LOAD r0 r1 @SPOW
      LOAD r3 r2 @ACCS
      ADD r3 r3 r0
      STORE r3 r2 @ACCS
      LOAD r0 r1 @APOW
      LOAD r3 r2 @ACCA
      ADD r3 r3 r0
      STORE r3 r2 @ACCA
      LOAD r0 r1 @BPOW
      LOAD r3 r2 @ACCB
      ADD r3 r3 r0
      STORE r3 r2 @ACCB
      LOADI r0 @SEG
      ADD r1 r1 r0
      LOADI r0 @END
      SUB r0 r0 r1
      JNZ r0 p1
      LOADI r1 0
      LOAD r0 r1 @ACCS
      STORE r0 r1 @SVAL
p2:   LOAD r0 r1 @ISX
      JNZ r0 own
      LOAD r2 r1 @KEY
      LOADI r3 @SEG
      MUL r2 r2 r3
      SUB r2 r2 r1
      JNZ r2 next
      LOAD r0 r1 @ACCS
      LOADI r3 0
      LOAD r3 r3 @SVAL
      SUB r0 r0 r3
      JNZ r0 fail
      LOADI r3 0
      LOAD r0 r1 @ACCA
      LOAD r2 r3 @GPA
      MUL r2 r2 r0
      STORE r2 r3 @GPA
      LOAD r0 r1 @ACCB
      LOAD r2 r3 @GPB
      MUL r2 r2 r0
      STORE r2 r3 @GPB
      LOADI r0 1
      JNZ r0 next
own:  LOADI r0 0
      STORE r1 r0 @BASE
      LOAD r2 r1 @NA
      ADD r3 r1 r0
la:   JNZ r2 lab
      LOADI r0 1
      JNZ r0 lad
lab:  LOAD r0 r3 @EA
      LOADI r1 0
      LOAD r1 r1 @SVAL
      SUB r0 r0 r1
      LOADI r1 0
      LOAD r1 r1 @GPA
      MUL r1 r1 r0
      LOADI r0 0
      STORE r1 r0 @GPA
      LOADI r0 1
      ADD r3 r3 r0
      SUB r2 r2 r0
      JNZ r0 la
lad:  LOADI r0 0
      LOAD r1 r0 @BASE
      LOAD r2 r1 @NB
      ADD r3 r1 r0
lb:   JNZ r2 lbb
      LOADI r0 1
      JNZ r0 lbd
lbb:  LOAD r0 r3 @EB
      LOADI r1 0
      LOAD r1 r1 @SVAL
      SUB r0 r0 r1
      LOADI r1 0
      LOAD r1 r1 @GPB
      MUL r1 r1 r0
      LOADI r0 0
      STORE r1 r0 @GPB
      LOADI r0 1
      ADD r3 r3 r0
      SUB r2 r2 r0
      JNZ r0 lb
lbd:  LOADI r0 0
      LOAD r1 r0 @BASE
next: LOADI r0 @SEG
      ADD r1 r1 r0
      LOADI r0 @END
      SUB r0 r0 r1
      JNZ r0 p2
      LOADI r1 0
      LOAD r0 r1 @ACCA
      LOAD r2 r1 @GPA
      SUB r0 r0 r2
      JNZ r0 fail
      LOAD r0 r1 @ACCB
      LOAD r2 r1 @GPB
      SUB r0 r0 r2
      JNZ r0 fail
      LOAD r0 r1 @TOP
      JNZ r0 top
      LOADI r0 1
      HALT01 r0
top:  LOAD r0 r1 @ACCA
      LOAD r2 r1 @ACCB
      SUB r0 r0 r2
      JNZ r0 fail
      LOADI r0 1
      HALT01 r0
fail: LOADI r0 0
      HALT01 r0
)";

const char* kSumSource = R"(
      LOADI r0 0
      LOADI r1 0
      STORE r0 r1 @GPA
p1:   LOAD r2 r1 @KEY
      LOADI r3 @SEG
      MUL r2 r2 r3
      LOAD r0 r1 @APOW
      LOAD r3 r2 @ACCA
      ADD r3 r3 r0
      STORE r3 r2 @ACCA
      LOADI r0 @SEG
      ADD r1 r1 r0
      LOADI r0 @END
      SUB r0 r0 r1
      JNZ r0 p1
      LOADI r1 0
p2:   LOAD r0 r1 @ISX
      JNZ r0 own
      LOAD r2 r1 @KEY
      LOADI r3 @SEG
      MUL r2 r2 r3
      SUB r2 r2 r1
      JNZ r2 next
      LOADI r3 0
      LOAD r0 r1 @ACCA
      LOAD r2 r3 @GPA
      ADD r2 r2 r0
      STORE r2 r3 @GPA
      LOADI r0 1
      JNZ r0 next
own:  LOADI r0 0
      STORE r1 r0 @BASE
      LOAD r2 r1 @NA
      ADD r3 r1 r0
la:   JNZ r2 lab
      LOADI r0 1
      JNZ r0 lad
lab:  LOAD r0 r3 @EA
      LOADI r1 0
      LOAD r1 r1 @GPA
      ADD r1 r1 r0
      LOADI r0 0
      STORE r1 r0 @GPA
      LOADI r0 1
      ADD r3 r3 r0
      SUB r2 r2 r0
      JNZ r0 la
lad:  LOADI r0 0
      LOAD r1 r0 @BASE
next: LOADI r0 @SEG
      ADD r1 r1 r0
      LOADI r0 @END
      SUB r0 r0 r1
      JNZ r0 p2
      LOADI r1 0
      LOAD r0 r1 @ACCA
      LOAD r2 r1 @GPA
      SUB r0 r0 r2
      JNZ r0 fail
      LOAD r0 r1 @TOP
      JNZ r0 top
      LOADI r0 1
      HALT01 r0
top:  LOAD r0 r1 @ACCA
      LOADI r2 @K
      SUB r0 r0 r2
      JNZ r0 fail
      LOADI r0 1
      HALT01 r0
fail: LOADI r0 0
      HALT01 r0
)";

Big pow2(unsigned e)
{
    return Big(1) << e;
}

Big low_bits(const Big& x, unsigned from, unsigned len)
{
    return (x >> from) & (pow2(len) - 1);
}

struct Part {
    bool present = false;
    uint64_t id = 0;
    uint64_t rsz = 0;
    uint64_t N = 0;
    uint64_t key = 0;
    std::vector<StepRecord> steps;
    std::vector<FinalRead> finals;
    Big pl = 0;
    Big pr = 0;
};

// A node's own messages, parsed once.
struct Own {
    bool ok = false;
    uint8_t d3 = 0;
    BlockLabel lab;
    uint64_t b = 0;
    Big coin = 0;
    Big coin2 = 0;
    O1Reply reply;
    Big sc = 0;
    Big sa = 0;
    Big sb = 0;
    Part part[2];
    Big s2 = 0;
    Big pp2 = 0;
};

// What a neighbor announces in exchange step 0.
struct Nbr {
    uint8_t d3 = 0;
    BlockLabel lab;
    uint64_t s = 0;
    uint64_t br = 0;
    Big s2 = 0;
    Big pp2 = 0;
    Part part[2];
};

bool read_header(const LoglogProtocol& P, BitReader& r, Part& p)
{
    const unsigned w = P.id_bits();
    p.present = true;
    p.id = r.get(w);
    p.rsz = r.get(w);
    p.N = r.get(w);
    p.key = r.get(w);
    return !r.fail() && p.N >= 1 && p.N <= static_cast<uint64_t>(P.n());
}

void write_header(const LoglogProtocol& P, BitWriter& w, const Part& p)
{
    const unsigned b = P.id_bits();
    w.put(p.id, b).put(p.rsz, b).put(p.N, b).put(p.key, b);
}

bool read_labels(const LoglogProtocol& P, BitReader& r, Own& o)
{
    o.d3 = static_cast<uint8_t>(r.get(2));
    o.lab = unpack_block_label(P.b(), r.get(block_label_bits(P.b())));
    return !r.fail() && o.d3 <= 2 && o.lab.bsize >= 1 && (o.lab.top || o.lab.bsize >= 2);
}

bool read_runs(const LoglogProtocol& P, BitReader& r, Own& o)
{
    const int parts = o.lab.top ? 1 : 2;
    for (int j = 0; j < parts; ++j) {
        if (!read_header(P, r, o.part[j])) {
            return false;
        }
        RunGeometry geo = P.geometry(o.part[j].N);
        o.part[j].steps = read_steps(r, geo);
        o.part[j].finals = read_finals(r, geo);
    }
    return !r.fail();
}

bool parse_own(const LoglogProtocol& P, const NodeTranscript& tr, Own& o)
{
    const bool seteq = P.mode() == LoglogMode::SetEquality;
    const unsigned t = static_cast<unsigned>(P.reps());
    const unsigned pw = P.outer().bits();
    if (tr.msgs.size() != P.schedule().size()) {
        return false;
    }
    {
        BitReader r(tr.msgs[0]);
        if (!read_labels(P, r, o)) {
            return false;
        }
        if (!seteq) {
            o.sa = r.get_big(P.qa(o.lab));
            if (!read_runs(P, r, o) || !r.done()) {
                return false;
            }
        } else if (!r.done()) {
            return false;
        }
    }
    {
        BitReader r(tr.msgs[1]);
        o.b = r.get(t);
        if (seteq) {
            o.coin = r.get_big(P.coin_bits());
        } else {
            o.coin2 = r.get_big(P.coin2_bits());
        }
        if (!r.done()) {
            return false;
        }
    }
    if (seteq) {
        BitReader r(tr.msgs[2]);
        o.reply.s = r.get(t);
        o.reply.br = r.get(t);
        o.sc = r.get_big(P.qc(o.lab));
        o.sa = r.get_big(P.qa(o.lab));
        o.sb = r.get_big(P.qa(o.lab));
        if (!read_runs(P, r, o) || !r.done()) {
            return false;
        }
        BitReader r3(tr.msgs[3]);
        o.coin2 = r3.get_big(P.coin2_bits());
        if (!r3.done()) {
            return false;
        }
    }
    BitReader r(tr.msgs[P.msg_final()]);
    if (!seteq) {
        o.reply.s = r.get(t);
        o.reply.br = r.get(t);
    }
    o.s2 = r.get_big(pw);
    if (o.lab.top) {
        o.pp2 = r.get_big(pw);
    }
    for (int j = 0; j < 2; ++j) {
        if (o.part[j].present) {
            o.part[j].pl = r.get_big(pw);
            o.part[j].pr = r.get_big(pw);
        }
    }
    return r.done();
}

const Own& cached_own(const LoglogProtocol& P, NodeTranscript& tr)
{
    if (!tr.cache) {
        auto o = std::make_shared<Own>();
        o->ok = parse_own(P, tr, *o);
        tr.cache = o;
    }
    return *static_cast<const Own*>(tr.cache.get());
}

Bits encode_announce(const LoglogProtocol& P, const Own& o)
{
    const unsigned t = static_cast<unsigned>(P.reps());
    const unsigned pw = P.outer().bits();
    BitWriter w;
    w.put(o.d3, 2).put(pack_block_label(P.b(), o.lab), block_label_bits(P.b()));
    w.put(o.reply.s, t).put(o.reply.br, t).put_big(o.s2, pw);
    if (o.lab.top) {
        w.put_big(o.pp2, pw);
    }
    for (int j = 0; j < 2; ++j) {
        if (o.part[j].present) {
            write_header(P, w, o.part[j]);
            w.put_big(o.part[j].pl, pw).put_big(o.part[j].pr, pw);
        }
    }
    return w.take();
}

bool decode_announce(const LoglogProtocol& P, const Bits& bits, Nbr& x)
{
    const unsigned t = static_cast<unsigned>(P.reps());
    const unsigned pw = P.outer().bits();
    BitReader r(bits);
    x.d3 = static_cast<uint8_t>(r.get(2));
    x.lab = unpack_block_label(P.b(), r.get(block_label_bits(P.b())));
    x.s = r.get(t);
    x.br = r.get(t);
    x.s2 = r.get_big(pw);
    if (x.lab.top) {
        x.pp2 = r.get_big(pw);
    }
    for (int j = 0; j < (x.lab.top ? 1 : 2); ++j) {
        if (!read_header(P, r, x.part[j])) {
            return false;
        }
        x.part[j].pl = r.get_big(pw);
        x.part[j].pr = r.get_big(pw);
    }
    return r.done() && x.d3 <= 2;
}

Big list_product_minus(const Field& f, const Multiset& xs, const Big& s)
{
    Big acc = 1;
    for (const auto& x : xs) {
        acc = f.mul(acc, f.sub(f.reduce(x), s));
    }
    return acc;
}

// (n + 1) segments of the widest layout.
Big address_bound(int n, const std::vector<Multiset>& a, const std::vector<Multiset>& b)
{
    LoglogLayout lay;
    for (const auto* side : {&a, &b}) {
        for (const auto& l : *side) {
            lay.lmax = std::max<uint64_t>(lay.lmax, l.size());
        }
    }
    return Big(static_cast<uint64_t>(n) + 1) * lay.seg();
}

} // namespace

std::string loglog_source(LoglogMode mode, const LoglogLayout& lay, uint64_t N, const Big& K)
{
    auto s = [](uint64_t x) { return std::to_string(x); };
    std::vector<std::pair<std::string, std::string>> subs = {
        {"@SEG", s(lay.seg())},   {"@END", s(N * lay.seg())}, {"@KEY", s(lay.KEY)},   {"@ISX", s(lay.ISX)},
        {"@TOP", s(lay.TOP)},     {"@SPOW", s(lay.SPOW)},     {"@APOW", s(lay.APOW)}, {"@BPOW", s(lay.BPOW)},
        {"@NA", s(lay.NA)},       {"@NB", s(lay.NB)},         {"@EA", s(lay.EA)},     {"@EB", s(lay.EB())},
        {"@ACCS", s(lay.ACCS())}, {"@ACCA", s(lay.ACCA())},   {"@ACCB", s(lay.ACCB())}, {"@GPA", s(lay.GPA())},
        {"@GPB", s(lay.GPB())},   {"@BASE", s(lay.BASE())},   {"@SVAL", s(lay.SVAL())}, {"@K", K.str()},
    };
    return substitute(mode == LoglogMode::SetEquality ? kSetEqSource : kSumSource, subs);
}

LoglogProtocol::LoglogProtocol(LoglogMode mode, std::vector<Multiset> a, std::vector<Multiset> b, Big K, Field word,
                               int b_param, int t)
    : mode_(mode), n_(static_cast<int>(a.size())), t_(t), a_(std::move(a)), bl_(std::move(b)), K_(std::move(K)),
      word_(std::move(word))
{
    if (n_ < 1 || (mode_ == LoglogMode::SetEquality && bl_.size() != a_.size())) {
        throw std::invalid_argument("loglog: list count must match the node count");
    }
    if (t_ < 1 || t_ > 64) {
        throw std::invalid_argument("loglog: repetitions must be in 1..64");
    }
    name_ = mode_ == LoglogMode::SetEquality ? "set-equality-loglog" : "sum-up-tree";
    b_ = b_param > 0 ? b_param : default_block_param(n_);
    if (b_ < 2 || block_label_bits(b_) > 60) {
        throw std::invalid_argument("loglog: block parameter out of range");
    }
    size_t lmax = 1;
    for (int u = 0; u < n_; ++u) {
        lmax = std::max(lmax, a_[u].size());
        if (mode_ == LoglogMode::SetEquality) {
            lmax = std::max(lmax, bl_[u].size());
        }
        for (const auto* l : {&a_[u], mode_ == LoglogMode::SetEquality ? &bl_[u] : &a_[u]}) {
            for (const auto& x : *l) {
                if (!word_.contains(x)) {
                    throw std::invalid_argument("loglog: element outside the word field");
                }
            }
        }
    }
    lay_.lmax = lmax;
    // Addresses are computed in registers, so they must not wrap.
    if (word_.modulus() <= Big(static_cast<uint64_t>(n_) + 1) * lay_.seg()) {
        throw std::invalid_argument("loglog: word field smaller than the address space");
    }
    // Every element of every run fits the codec of the largest run.
    RamCodec codec = RamCodec::for_run(geometry(static_cast<uint64_t>(n_)), 0, 0);
    outer_ = Field(next_prime(pow2(codec.width() + 1)));
}

std::shared_ptr<LoglogProtocol> LoglogProtocol::set_equality(std::vector<Multiset> a, std::vector<Multiset> b,
                                                             int b_param, int t)
{
    Big bound = 1;
    for (const auto* side : {&a, &b}) {
        for (const auto& l : *side) {
            for (const auto& x : l) {
                bound = std::max(bound, Big(x + 1));
            }
        }
    }
    const int n = static_cast<int>(a.size());
    Field f = seteq_config_for(std::max(n, 2), bound).field;
    if (f.modulus() <= address_bound(n, a, b)) {
        f = Field(next_prime(address_bound(n, a, b) + 1));
    }
    return std::shared_ptr<LoglogProtocol>(
        new LoglogProtocol(LoglogMode::SetEquality, std::move(a), std::move(b), 0, f, b_param, t));
}

std::shared_ptr<LoglogProtocol> LoglogProtocol::sum(std::vector<uint64_t> values, uint64_t K, int b_param, int t)
{
    const uint64_t n = values.size();
    Big total = 0;
    std::vector<Multiset> a;
    for (uint64_t x : values) {
        total += x;
        a.push_back({Big(x)});
    }
    Big bound = std::max({Big(total) + 1, Big(K) + 1, big_pow(std::max<uint64_t>(n, 2), 3),
                          address_bound(static_cast<int>(n), a, {})});
    Field f(next_prime(2 * bound + 1));
    return std::shared_ptr<LoglogProtocol>(
        new LoglogProtocol(LoglogMode::Sum, std::move(a), {}, Big(K), f, b_param, t));
}

std::vector<Dir> LoglogProtocol::schedule() const
{
    if (mode_ == LoglogMode::SetEquality) {
        return {Dir::ProverToNodes, Dir::NodesToProver, Dir::ProverToNodes, Dir::NodesToProver, Dir::ProverToNodes};
    }
    return {Dir::ProverToNodes, Dir::NodesToProver, Dir::ProverToNodes};
}

unsigned LoglogProtocol::coin_bits() const
{
    if (mode_ != LoglogMode::SetEquality) {
        return 0;
    }
    uint64_t h = std::min<uint64_t>(static_cast<uint64_t>(b_), static_cast<uint64_t>(n_));
    return static_cast<unsigned>((c_bits() + h - 1) / h);
}

unsigned LoglogProtocol::coin2_bits() const
{
    uint64_t h = std::min<uint64_t>(static_cast<uint64_t>(b_), static_cast<uint64_t>(n_));
    return static_cast<unsigned>((c2_bits() + h - 1) / h);
}

unsigned LoglogProtocol::qc(const BlockLabel& l) const
{
    if (mode_ != LoglogMode::SetEquality) {
        return 0;
    }
    if (l.top) {
        return coin_bits();
    }
    uint64_t h = std::max<uint64_t>(holders(l), 1);
    return static_cast<unsigned>((word_.bits() + h - 1) / h);
}

unsigned LoglogProtocol::qa(const BlockLabel& l) const
{
    uint64_t h = std::max<uint64_t>(holders(l), 1);
    return static_cast<unsigned>((word_.bits() + h - 1) / h);
}

uint64_t LoglogProtocol::steps_per_participant(uint64_t N) const
{
    // Longest path: 24 fixed steps, 20 in pass 1 and at most 23 + 14 per
    // element in pass 2 per participant; one more so step tau is a halt.
    const uint64_t tau = 25 + N * (43 + 28 * lay_.lmax);
    return (tau + N - 1) / N;
}

const Program& LoglogProtocol::program(uint64_t N) const
{
    std::lock_guard<std::mutex> lock(mu_);
    auto it = programs_.find(N);
    if (it == programs_.end()) {
        auto p = std::make_unique<Program>(assemble(loglog_source(mode_, lay_, N, K_), word_, N * lay_.seg()));
        it = programs_.emplace(N, std::move(p)).first;
    }
    return *it->second;
}

RunGeometry LoglogProtocol::geometry(uint64_t N) const
{
    RunGeometry g;
    g.program = &program(N);
    g.participants = N;
    g.k = steps_per_participant(N);
    g.seg = lay_.seg();
    return g;
}

Big LoglogProtocol::shard_weight(unsigned q, uint64_t hidx, const Field& f) const
{
    return f.pow(Big(2), Big(q) * hidx);
}

std::vector<Big> LoglogProtocol::segment_words(int u, bool home, const BlockLabel& lab, uint64_t key, const Big& sc,
                                               const Big& sa, const Big& sb) const
{
    std::vector<Big> seg(lay_.seg(), 0);
    seg[lay_.KEY] = word_.from_u64(key);
    seg[lay_.ISX] = home ? 1 : 0;
    seg[lay_.TOP] = home && lab.top ? 1 : 0;
    const Big wa = shard_weight(qa(lab), lab.hidx, word_);
    seg[lay_.APOW] = word_.mul(word_.reduce(sa), wa);
    if (mode_ == LoglogMode::SetEquality) {
        seg[lay_.SPOW] = word_.mul(word_.reduce(sc), shard_weight(qc(lab), lab.hidx, word_));
        seg[lay_.BPOW] = word_.mul(word_.reduce(sb), wa);
    }
    if (home) {
        seg[lay_.NA] = a_[u].size();
        std::copy(a_[u].begin(), a_[u].end(), seg.begin() + static_cast<long>(lay_.EA));
        if (mode_ == LoglogMode::SetEquality) {
            seg[lay_.NB] = bl_[u].size();
            std::copy(bl_[u].begin(), bl_[u].end(), seg.begin() + static_cast<long>(lay_.EB()));
        }
    }
    return seg;
}

Bits LoglogProtocol::node_message(int msg, const NodeView&, RandomTape& tape) const
{
    Bits out;
    if (msg == 1) {
        out = tape.take(static_cast<size_t>(t_));
        out.append(tape.take(mode_ == LoglogMode::SetEquality ? coin_bits() : coin2_bits()));
    } else if (msg == 3) {
        out = tape.take(coin2_bits());
    }
    return out;
}

std::vector<Packet> LoglogProtocol::node_exchange(int step, const NodeView& v, NodeTranscript& tr,
                                                  const Inbox& inbox) const
{
    const Own& me = cached_own(*this, tr);
    std::vector<Packet> out(v.deg());
    if (step == 0) {
        if (me.ok) {
            Bits a = encode_announce(*this, me);
            for (auto& p : out) {
                p = Packet{a};
            }
        }
        return out;
    }
    std::vector<uint8_t> nd3(v.deg(), 3);
    for (int q = 0; q < v.deg(); ++q) {
        if (inbox[0][q].size() == 1 && inbox[0][q][0].size() >= 2) {
            BitReader r(inbox[0][q][0]);
            nd3[q] = static_cast<uint8_t>(r.get(2));
        }
    }
    const int pp = me.ok ? o1_parent_port(v, me.d3, nd3) : -1;
    for (int q = 0; q < v.deg(); ++q) {
        Bits f;
        f.push_back(q == pp);
        out[q] = Packet{f};
    }
    return out;
}

bool LoglogProtocol::node_decide(const NodeView& v, NodeTranscript& tr, const Inbox& inbox) const
{
    const Own& me = cached_own(*this, tr);
    if (!me.ok) {
        return false;
    }
    const bool seteq = mode_ == LoglogMode::SetEquality;
    const int deg = v.deg();
    std::vector<Nbr> nb(deg);
    std::vector<uint8_t> nd3(deg);
    std::vector<BlockLabel> nlab(deg);
    std::vector<char> is_child(deg, 0);
    for (int q = 0; q < deg; ++q) {
        if (inbox[0][q].size() != 1 || !decode_announce(*this, inbox[0][q][0], nb[q])) {
            return false;
        }
        if (nb[q].br != me.reply.br || nb[q].s2 != me.s2) {
            return false;
        }
        nd3[q] = nb[q].d3;
        nlab[q] = nb[q].lab;
        if (inbox[1][q].size() != 1 || inbox[1][q][0].size() != 1) {
            return false;
        }
        is_child[q] = inbox[1][q][0][0];
    }

    // The O(1)-bit tree.
    const int pp = o1_parent_port(v, me.d3, nd3);
    const bool root = pp < 0;
    if (!root && is_child[pp]) {
        return false;
    }
    if (root) {
        if (me.reply.s != me.b || me.reply.br != me.b) {
            return false;
        }
    } else if (me.reply.s != (nb[pp].s ^ me.b)) {
        return false;
    }

    // Blocks.
    LocalBlocks lb;
    if (!check_block_labels(v, b_, me.lab, nlab, pp, is_child, &lb)) {
        return false;
    }
    const BlockLabel& L = me.lab;

    // The points: s from the top coins (inside the run), s' from the top
    // partial sums of the c' coins.
    if (seteq && L.top && me.sc != me.coin) {
        return false;
    }
    if (!outer_.contains(me.s2)) {
        return false;
    }
    if (L.top) {
        Big acc = outer_.mul(outer_.reduce(me.coin2), shard_weight(coin2_bits(), L.hidx, outer_));
        const std::vector<int>* kids = &lb.home_children;
        static const std::vector<int> none;
        if (root) {
            kids = lb.top_group >= 0 ? &lb.groups[lb.top_group] : &none;
        }
        for (int q : *kids) {
            if (!nlab[q].top || !outer_.contains(nb[q].pp2)) {
                return false;
            }
            acc = outer_.add(acc, nb[q].pp2);
        }
        if (me.pp2 != acc || (root && me.pp2 != me.s2)) {
            return false;
        }
    }

    // Own participations.
    auto same_home = [&](int q) { return !nlab[q].prt || (root && nlab[q].top); };
    for (int j = 0; j < 2; ++j) {
        const Part& P = me.part[j];
        if (P.present != (j == HOME || !L.top)) {
            return false;
        }
        if (!P.present) {
            continue;
        }
        if (P.id >= P.N || P.rsz < 1 || P.id + P.rsz > P.N || P.key >= P.N) {
            return false;
        }
        if (L.hidx == 0 && P.key != P.id) {
            return false;
        }
        // Run parent.
        int prole = -1;
        if (j == HOME) {
            if (!root && (!L.prt || L.top)) {
                prole = HOME;
            }
        } else {
            prole = L.prt ? HOME : PARENT;
        }
        if (prole >= 0) {
            const Part& up = nb[pp].part[prole];
            if (!up.present || up.N != P.N) {
                return false;
            }
            if (!L.prt || (j == HOME && L.top)) {
                if (up.key != P.key) {
                    return false;
                }
            }
        } else if (j == HOME && root && (P.id != 0 || P.rsz != P.N)) {
            return false;
        }
        // Run children in port order.
        std::vector<std::pair<int, int>> kids;
        for (int q = 0; q < deg; ++q) {
            if (!is_child[q]) {
                continue;
            }
            if (same_home(q)) {
                kids.emplace_back(q, j);
            } else if (j == HOME) {
                kids.emplace_back(q, PARENT);
            }
        }
        uint64_t next = P.id + 1;
        RunGeometry geo = geometry(P.N);
        RamCodec codec = RamCodec::for_run(geo, 0, 0);
        Multiset left, right;
        RunShare share;
        share.id = P.id;
        share.init = segment_words(v.id, j == HOME, L, P.key, me.sc, me.sa, me.sb);
        share.steps = P.steps;
        share.finals = P.finals;
        if (!ram_share_lists(geo, codec, share, left, right)) {
            return false;
        }
        Big pl = list_product_minus(outer_, left, me.s2);
        Big pr = list_product_minus(outer_, right, me.s2);
        for (auto [q, role] : kids) {
            const Part& c = nb[q].part[role];
            if (!c.present || c.id != next || c.N != P.N) {
                return false;
            }
            next += c.rsz;
            pl = outer_.mul(pl, outer_.reduce(c.pl));
            pr = outer_.mul(pr, outer_.reduce(c.pr));
        }
        if (next != P.id + P.rsz || pl != P.pl || pr != P.pr) {
            return false;
        }
        // Holders of a child block all name the same representative.
        if (j == HOME) {
            for (size_t gi = 0; gi < lb.groups.size(); ++gi) {
                if (static_cast<int>(gi) == lb.top_group) {
                    continue;
                }
                const auto& grp = lb.groups[gi];
                for (int q : grp) {
                    if (nb[q].part[PARENT].key != nb[grp[0]].part[PARENT].key) {
                        return false;
                    }
                }
            }
        }
        if (j == HOME && root && P.pl != P.pr) {
            return false;
        }
    }

    // Relay duty for every non-top block rooted here.
    for (size_t gi = 0; gi < lb.groups.size(); ++gi) {
        if (static_cast<int>(gi) == lb.top_group) {
            continue;
        }
        const auto& grp = lb.groups[gi];
        const uint64_t N = nb[grp[0]].part[HOME].N;
        uint64_t next = 0;
        Big pl = 1, pr = 1;
        for (int q : grp) {
            const Part& c = nb[q].part[HOME];
            if (!c.present || c.id != next || c.N != N || c.key != nb[grp[0]].part[HOME].key) {
                return false;
            }
            next += c.rsz;
            pl = outer_.mul(pl, outer_.reduce(c.pl));
            pr = outer_.mul(pr, outer_.reduce(c.pr));
        }
        if (next != N || pl != pr) {
            return false;
        }
    }
    return true;
}

std::vector<std::string> loglog_strategy_names()
{
    return {"honest", "state-tamper", "shard-flip"};
}

LoglogStrategy loglog_strategy(const std::string& name)
{
    if (name == "honest") {
        return LoglogStrategy::Honest;
    }
    if (name == "state-tamper") {
        return LoglogStrategy::StateTamper;
    }
    if (name == "shard-flip") {
        return LoglogStrategy::ShardFlip;
    }
    throw std::invalid_argument("unknown loglog strategy " + name);
}

namespace {

// One run R(X): participants by ID with their role, run-parent ID and
// subtree size.
struct RunPlan {
    int block = -1;
    std::vector<std::pair<int, int>> who;
    std::vector<int64_t> up;
    std::vector<uint64_t> rsz;
    std::vector<uint64_t> key;
};

class LoglogProver : public Prover {
  public:
    LoglogProver(std::shared_ptr<const LoglogProtocol> p, LoglogStrategy s) : p_(std::move(p)), strategy_(s) {}

    std::vector<Bits> respond(int msg, const ProverView& view) override
    {
        const Graph& g = view.graph;
        const bool seteq = p_->mode() == LoglogMode::SetEquality;
        if (msg == 0) {
            setup(g);
            if (!seteq) {
                shard_values(Big(0));
                return encode_main(g, true);
            }
            std::vector<Bits> out(g.n);
            for (int u = 0; u < g.n; ++u) {
                out[u] = labels_bits(u);
            }
            return out;
        }
        if (msg == 2 && seteq) {
            read_coins(g, view.node_msgs[1]);
            Big c = 0;
            for (int u : d_.holders(d_.top)) {
                c += coin_[u] << (p_->coin_bits() * labels_[u].hidx);
            }
            shard_values(p_->word().reduce(c));
            return encode_main(g, false);
        }
        if (msg == p_->msg_final()) {
            if (!seteq) {
                read_coins(g, view.node_msgs[1]);
            }
            const int cm = p_->msg_coins2();
            const unsigned t = static_cast<unsigned>(p_->reps());
            std::vector<Big> coin2(g.n);
            for (int u = 0; u < g.n; ++u) {
                BitReader r(view.node_msgs[cm][u]);
                if (!seteq) {
                    r.get(t);
                }
                coin2[u] = r.get_big(p_->coin2_bits());
            }
            return encode_final(g, coin2);
        }
        return std::vector<Bits>(g.n);
    }

  private:
    void setup(const Graph& g)
    {
        d3_ = honest_d3(g, 0);
        parent_ = o1_parents(g, d3_);
        kids_ = children_of(g, parent_);
        d_ = greedy_blocks(g, parent_, p_->b());
        labels_ = block_labels(g, d_);
        sc_.assign(g.n, 0);
        sa_.assign(g.n, 0);
        sb_.assign(g.n, 0);
        coin_.assign(g.n, 0);
        tree_b_.assign(g.n, 0);
        plan_runs();
    }

    Bits labels_bits(int u) const
    {
        BitWriter w;
        w.put(d3_[u], 2).put(pack_block_label(p_->b(), labels_[u]), block_label_bits(p_->b()));
        return w.take();
    }

    void read_coins(const Graph& g, const std::vector<Bits>& msgs)
    {
        const unsigned t = static_cast<unsigned>(p_->reps());
        for (int u = 0; u < g.n; ++u) {
            BitReader r(msgs[u]);
            tree_b_[u] = r.get(t);
            coin_[u] = p_->mode() == LoglogMode::SetEquality ? r.get_big(p_->coin_bits()) : Big(0);
        }
        reply_ = o1_best_reply(g, d3_, tree_b_);
    }

    void plan_runs()
    {
        runs_.clear();
        for (size_t x = 0; x < d_.blocks.size(); ++x) {
            RunPlan plan;
            plan.block = static_cast<int>(x);
            std::function<void(int, int, int64_t)> dfs = [&](int v, int role, int64_t up) {
                const uint64_t id = plan.who.size();
                plan.who.emplace_back(v, role);
                plan.up.push_back(up);
                plan.rsz.push_back(1);
                for (int c : kids_[v]) {
                    const bool same = d_.home[c] == d_.home[v];
                    if (same) {
                        dfs(c, role, static_cast<int64_t>(id));
                    } else if (role == HOME) {
                        dfs(c, PARENT, static_cast<int64_t>(id));
                    }
                }
                plan.rsz[id] = plan.who.size() - id;
            };
            const Block& blk = d_.blocks[x];
            if (blk.top) {
                dfs(blk.root, HOME, -1);
            } else {
                for (int c : kids_[blk.root]) {
                    if (d_.home[c] == static_cast<int>(x)) {
                        dfs(c, HOME, -1);
                    }
                }
            }
            std::unordered_map<int, uint64_t> id_of;
            for (size_t i = 0; i < plan.who.size(); ++i) {
                id_of[plan.who[i].first] = i;
            }
            for (size_t i = 0; i < plan.who.size(); ++i) {
                const int v = plan.who[i].first;
                const int rep = d_.holders(d_.home[v])[0];
                plan.key.push_back(id_of.at(rep));
            }
            runs_.push_back(std::move(plan));
        }
    }

    // Shards of s (SetEquality) and of each block's A and B.
    void shard_values(const Big& s)
    {
        const Field& f = p_->word();
        const bool seteq = p_->mode() == LoglogMode::SetEquality;
        const size_t nb = d_.blocks.size();
        std::vector<std::vector<int>> child_blocks(nb);
        for (size_t x = 0; x < nb; ++x) {
            int up = d_.block_parent(static_cast<int>(x));
            if (up >= 0) {
                child_blocks[up].push_back(static_cast<int>(x));
            }
        }
        std::vector<int> order{d_.top};
        for (size_t i = 0; i < order.size(); ++i) {
            for (int c : child_blocks[order[i]]) {
                order.push_back(c);
            }
        }
        std::vector<Big> A(nb), B(nb);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int x = *it;
            Big a = seteq ? Big(1) : Big(0);
            Big b = 1;
            for (int h : d_.holders(x)) {
                if (seteq) {
                    a = f.mul(a, list_product(f, p_->a()[h], s));
                    b = f.mul(b, list_product(f, p_->b_lists()[h], s));
                } else {
                    a = f.add(a, f.reduce(p_->a()[h][0]));
                }
            }
            for (int c : child_blocks[x]) {
                a = seteq ? f.mul(a, A[c]) : f.add(a, A[c]);
                b = f.mul(b, B[c]);
            }
            A[x] = a;
            B[x] = b;
        }
        int flip_block = -1;
        if (strategy_ == LoglogStrategy::ShardFlip) {
            flip_block = d_.top;
            for (size_t x = 0; x < nb; ++x) {
                if (!d_.blocks[x].top) {
                    flip_block = static_cast<int>(x);
                    break;
                }
            }
        }
        for (size_t x = 0; x < nb; ++x) {
            const auto hs = d_.holders(static_cast<int>(x));
            for (size_t j = 0; j < hs.size(); ++j) {
                const int u = hs[j];
                const BlockLabel& l = labels_[u];
                const unsigned qa = p_->qa(l);
                sa_[u] = low_bits(A[x], qa * static_cast<unsigned>(j), qa);
                sb_[u] = seteq ? low_bits(B[x], qa * static_cast<unsigned>(j), qa) : Big(0);
                if (seteq) {
                    sc_[u] = d_.blocks[x].top ? coin_[u] : low_bits(s, p_->qc(l) * static_cast<unsigned>(j), p_->qc(l));
                }
                if (static_cast<int>(x) == flip_block && j == 0 && qa > 0) {
                    sa_[u] ^= 1;
                }
            }
        }
    }

    // Runs every machine and hands each participant's share to f.
    template <typename F>
    void for_each_share(F&& f) const
    {
        for (size_t x = 0; x < runs_.size(); ++x) {
            const RunPlan& plan = runs_[x];
            const uint64_t N = plan.who.size();
            RunGeometry geo = p_->geometry(N);
            std::vector<Big> mem;
            mem.reserve(N * geo.seg);
            for (uint64_t i = 0; i < N; ++i) {
                auto [v, role] = plan.who[i];
                auto seg = p_->segment_words(v, role == HOME, labels_[v], plan.key[i], sc_[v], sa_[v], sb_[v]);
                mem.insert(mem.end(), seg.begin(), seg.end());
            }
            MachineRun run = run_machine(*geo.program, mem, geo.tau());
            const bool tamper = strategy_ != LoglogStrategy::Honest && !run.y;
            if (tamper) {
                for (uint64_t t = run.halted_after; t <= geo.tau(); ++t) {
                    auto& s = run.steps[t - 1].s;
                    s.r[geo.program->code[s.pc].a] = 1;
                }
            }
            auto shares = split_run(geo, mem, run);
            f(x, geo, shares);
        }
    }

    std::vector<Bits> encode_main(const Graph& g, bool sum_first)
    {
        const unsigned t = static_cast<unsigned>(p_->reps());
        std::vector<BitWriter> part(2 * g.n);
        for_each_share([&](size_t x, const RunGeometry& geo, const std::vector<RunShare>& shares) {
            const RunPlan& plan = runs_[x];
            for (size_t i = 0; i < plan.who.size(); ++i) {
                auto [v, role] = plan.who[i];
                BitWriter& w = part[2 * v + role];
                Part h;
                h.id = i;
                h.rsz = plan.rsz[i];
                h.N = plan.who.size();
                h.key = plan.key[i];
                write_header(*p_, w, h);
                write_steps(w, geo, shares[i].steps);
                write_finals(w, geo, shares[i].finals);
            }
        });
        std::vector<Bits> out(g.n);
        for (int u = 0; u < g.n; ++u) {
            const BlockLabel& l = labels_[u];
            BitWriter w;
            if (sum_first) {
                w.bits(labels_bits(u));
                w.put_big(sa_[u], p_->qa(l));
            } else {
                w.put(reply_[u].s, t).put(reply_[u].br, t);
                w.put_big(sc_[u], p_->qc(l)).put_big(sa_[u], p_->qa(l)).put_big(sb_[u], p_->qa(l));
            }
            w.bits(part[2 * u].out());
            if (!l.top) {
                w.bits(part[2 * u + 1].out());
            }
            out[u] = w.take();
        }
        return out;
    }

    std::vector<Bits> encode_final(const Graph& g, const std::vector<Big>& coin2)
    {
        const Field& F = p_->outer();
        const unsigned t = static_cast<unsigned>(p_->reps());
        const unsigned pw = F.bits();
        // s' and the top partial sums.
        Big c2 = 0;
        for (int u : d_.holders(d_.top)) {
            c2 += coin2[u] << (p_->coin2_bits() * labels_[u].hidx);
        }
        const Big s2 = F.reduce(c2);
        std::vector<Big> pp2(g.n, 0);
        for (int u : bottom_up_order(g, parent_)) {
            if (!labels_[u].top) {
                continue;
            }
            Big acc = F.mul(F.reduce(coin2[u]), p_->shard_weight(p_->coin2_bits(), labels_[u].hidx, F));
            for (int c : kids_[u]) {
                if (labels_[c].top) {
                    acc = F.add(acc, pp2[c]);
                }
            }
            pp2[u] = acc;
        }
        std::vector<Big> PL(2 * g.n, 0), PR(2 * g.n, 0);
        for_each_share([&](size_t x, const RunGeometry& geo, const std::vector<RunShare>& shares) {
            const RunPlan& plan = runs_[x];
            RamCodec codec = RamCodec::for_run(geo, 0, 0);
            const size_t N = plan.who.size();
            std::vector<Big> l(N), r(N);
            for (size_t i = 0; i < N; ++i) {
                Multiset left, right;
                ram_share_lists(geo, codec, shares[i], left, right);
                l[i] = list_product_minus(F, left, s2);
                r[i] = list_product_minus(F, right, s2);
            }
            for (size_t i = N; i-- > 0;) {
                if (plan.up[i] >= 0) {
                    l[plan.up[i]] = F.mul(l[plan.up[i]], l[i]);
                    r[plan.up[i]] = F.mul(r[plan.up[i]], r[i]);
                }
            }
            for (size_t i = 0; i < N; ++i) {
                auto [v, role] = plan.who[i];
                PL[2 * v + role] = l[i];
                PR[2 * v + role] = r[i];
            }
        });
        std::vector<Bits> out(g.n);
        for (int u = 0; u < g.n; ++u) {
            BitWriter w;
            if (p_->mode() == LoglogMode::Sum) {
                w.put(reply_[u].s, t).put(reply_[u].br, t);
            }
            w.put_big(s2, pw);
            if (labels_[u].top) {
                w.put_big(pp2[u], pw);
            }
            for (int j = 0; j < (labels_[u].top ? 1 : 2); ++j) {
                w.put_big(PL[2 * u + j], pw).put_big(PR[2 * u + j], pw);
            }
            out[u] = w.take();
        }
        return out;
    }

    std::shared_ptr<const LoglogProtocol> p_;
    LoglogStrategy strategy_;
    std::vector<uint8_t> d3_;
    std::vector<int> parent_;
    std::vector<std::vector<int>> kids_;
    BlockDecomposition d_;
    std::vector<BlockLabel> labels_;
    std::vector<RunPlan> runs_;
    std::vector<Big> sc_, sa_, sb_, coin_;
    std::vector<uint64_t> tree_b_;
    std::vector<O1Reply> reply_;
};

} // namespace

ProverFactory loglog_prover(std::shared_ptr<const LoglogProtocol> p, LoglogStrategy s)
{
    return [p, s](uint64_t) { return std::make_unique<LoglogProver>(p, s); };
}

std::shared_ptr<LoglogProtocol> dsym_loglog(const Graph& g, const std::vector<int>& pi, int b_param, int t)
{
    std::vector<Multiset> a, b;
    for (int u = 0; u < g.n; ++u) {
        a.push_back(edge_list_of(g, u));
        b.push_back(image_edge_list_of(g, pi, u));
    }
    auto p = LoglogProtocol::set_equality(std::move(a), std::move(b), b_param, t);
    p->set_name("dsym-loglog");
    return p;
}

std::shared_ptr<LoglogProtocol> sum_up_tree(const std::vector<uint64_t>& values, uint64_t K, int b_param, int t)
{
    return LoglogProtocol::sum(values, K, b_param, t);
}

} // namespace dip
