#include "dip/ram.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace dip {

namespace {

const std::map<std::string, Op>& opcode_table()
{
    static const std::map<std::string, Op> t = {
        {"LOADI", Op::LOADI}, {"LOAD", Op::LOAD},   {"STORE", Op::STORE}, {"ADD", Op::ADD},       {"SUB", Op::SUB},
        {"MUL", Op::MUL},     {"CMPLT", Op::CMPLT}, {"JNZ", Op::JNZ},     {"HALT01", Op::HALT01},
    };
    return t;
}

const char* op_name(Op op)
{
    switch (op) {
    case Op::LOADI: return "LOADI";
    case Op::LOAD: return "LOAD";
    case Op::STORE: return "STORE";
    case Op::ADD: return "ADD";
    case Op::SUB: return "SUB";
    case Op::MUL: return "MUL";
    case Op::CMPLT: return "CMPLT";
    case Op::JNZ: return "JNZ";
    case Op::HALT01: return "HALT01";
    }
    return "?";
}

std::string upper(std::string s)
{
    for (auto& c : s) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return s;
}

uint8_t parse_reg(const std::string& tok, int line)
{
    if (tok.size() == 2 && (tok[0] == 'r' || tok[0] == 'R') && tok[1] >= '0' && tok[1] < '0' + kRegisters) {
        return static_cast<uint8_t>(tok[1] - '0');
    }
    throw RamError("line " + std::to_string(line) + ": bad register " + tok);
}

Big parse_imm(const std::string& tok, const Field& word, int line)
{
    bool neg = !tok.empty() && tok[0] == '-';
    std::string digits = neg ? tok.substr(1) : tok;
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw RamError("line " + std::to_string(line) + ": bad immediate " + tok);
    }
    Big v(digits);
    v = word.reduce(v);
    return neg ? word.neg(v) : v;
}

Big parse_offset(const std::string& tok, int line)
{
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw RamError("line " + std::to_string(line) + ": bad offset " + tok);
    }
    return Big(tok);
}

} // namespace

bool is_memory_op(Op op)
{
    return op == Op::LOAD || op == Op::STORE;
}

Program assemble(const std::string& text, const Field& word, uint64_t memory_size)
{
    struct Pending {
        size_t index;
        std::string label;
        int line;
    };
    Program p;
    p.word = word;
    p.memory_size = memory_size;
    std::map<std::string, size_t> labels;
    std::vector<Pending> fixups;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto hash = raw.find('#');
        if (hash != std::string::npos) {
            raw.resize(hash);
        }
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        std::string t;
        while (ls >> t) {
            tok.push_back(t);
        }
        while (!tok.empty() && tok[0].back() == ':') {
            std::string name = tok[0].substr(0, tok[0].size() - 1);
            if (name.empty() || !labels.emplace(name, p.code.size()).second) {
                throw RamError("line " + std::to_string(line) + ": bad or duplicate label");
            }
            tok.erase(tok.begin());
        }
        if (tok.empty()) {
            continue;
        }
        auto it = opcode_table().find(upper(tok[0]));
        if (it == opcode_table().end()) {
            throw RamError("line " + std::to_string(line) + ": unknown opcode " + tok[0]);
        }
        Instr ins;
        ins.op = it->second;
        auto want = [&](size_t k) {
            if (tok.size() != k + 1) {
                throw RamError("line " + std::to_string(line) + ": " + tok[0] + " takes " + std::to_string(k) +
                               " operands");
            }
        };
        switch (ins.op) {
        case Op::LOADI:
            want(2);
            ins.a = parse_reg(tok[1], line);
            ins.imm = parse_imm(tok[2], word, line);
            break;
        case Op::LOAD:
        case Op::STORE:
            want(3);
            ins.a = parse_reg(tok[1], line);
            ins.b = parse_reg(tok[2], line);
            ins.imm = parse_offset(tok[3], line);
            break;
        case Op::ADD:
        case Op::SUB:
        case Op::MUL:
        case Op::CMPLT:
            want(3);
            ins.a = parse_reg(tok[1], line);
            ins.b = parse_reg(tok[2], line);
            ins.c = parse_reg(tok[3], line);
            break;
        case Op::JNZ:
            want(2);
            ins.a = parse_reg(tok[1], line);
            fixups.push_back({p.code.size(), tok[2], line});
            break;
        case Op::HALT01:
            want(1);
            ins.a = parse_reg(tok[1], line);
            break;
        }
        p.code.push_back(ins);
    }
    for (const auto& f : fixups) {
        auto it = labels.find(f.label);
        if (it != labels.end()) {
            p.code[f.index].imm = it->second;
        } else {
            p.code[f.index].imm = parse_offset(f.label, f.line);
        }
        if (p.code[f.index].imm >= p.code.size()) {
            throw RamError("line " + std::to_string(f.line) + ": jump target out of range");
        }
    }
    return p;
}

std::string disassemble(const Program& p)
{
    std::ostringstream out;
    for (const auto& i : p.code) {
        out << op_name(i.op);
        switch (i.op) {
        case Op::LOADI: out << " r" << int(i.a) << " " << i.imm; break;
        case Op::LOAD:
        case Op::STORE: out << " r" << int(i.a) << " r" << int(i.b) << " " << i.imm; break;
        case Op::JNZ: out << " r" << int(i.a) << " " << i.imm; break;
        case Op::HALT01: out << " r" << int(i.a); break;
        default: out << " r" << int(i.a) << " r" << int(i.b) << " r" << int(i.c); break;
        }
        out << "\n";
    }
    return out.str();
}

StepEffect apply_step(const Program& p, const MachineState& s, const Big& v_read)
{
    StepEffect e;
    if (s.pc >= p.code.size()) {
        e.ok = false;
        return e;
    }
    for (const auto& r : s.r) {
        if (!p.word.contains(r)) {
            e.ok = false;
            return e;
        }
    }
    const Instr& ins = p.code[s.pc];
    const Field& w = p.word;
    e.next = s;
    e.next.pc = s.pc + 1;
    switch (ins.op) {
    case Op::LOADI: e.next.r[ins.a] = ins.imm; break;
    case Op::LOAD:
    case Op::STORE: {
        Big addr = s.r[ins.b] + ins.imm;
        if (addr >= p.memory_size || !w.contains(v_read)) {
            e.ok = false;
            return e;
        }
        e.memory = true;
        e.addr = static_cast<uint64_t>(addr);
        if (ins.op == Op::LOAD) {
            e.next.r[ins.a] = v_read;
            e.v_write = v_read;
        } else {
            e.v_write = s.r[ins.a];
        }
        break;
    }
    case Op::ADD: e.next.r[ins.a] = w.add(s.r[ins.b], s.r[ins.c]); break;
    case Op::SUB: e.next.r[ins.a] = w.sub(s.r[ins.b], s.r[ins.c]); break;
    case Op::MUL: e.next.r[ins.a] = w.mul(s.r[ins.b], s.r[ins.c]); break;
    case Op::CMPLT: e.next.r[ins.a] = s.r[ins.b] < s.r[ins.c] ? 1 : 0; break;
    case Op::JNZ:
        if (s.r[ins.a] != 0) {
            e.next.pc = static_cast<uint64_t>(ins.imm);
        }
        break;
    case Op::HALT01:
        e.next = s;
        e.halt = true;
        break;
    }
    if (e.next.pc >= p.code.size()) {
        e.ok = false;
    }
    return e;
}

MachineRun run_machine(const Program& p, const std::vector<Big>& memory, uint64_t budget,
                       std::optional<ReadOverride> override_read)
{
    if (memory.size() > p.memory_size) {
        throw RamError("initial memory larger than the address space");
    }
    MachineRun run;
    std::vector<Big> mem(p.memory_size, 0);
    std::copy(memory.begin(), memory.end(), mem.begin());
    std::vector<uint64_t> when(p.memory_size, 0);
    MachineState s;
    bool halted = false;
    for (uint64_t t = 1; t <= budget; ++t) {
        StepRecord rec;
        rec.s = s;
        if (s.pc >= p.code.size()) {
            throw RamError("pc out of range");
        }
        const Instr& ins = p.code[s.pc];
        if (is_memory_op(ins.op)) {
            Big addr = s.r[ins.b] + ins.imm;
            if (addr >= p.memory_size) {
                throw RamError("address out of bounds at step " + std::to_string(t));
            }
            auto a = static_cast<uint64_t>(addr);
            rec.v_read = mem[a];
            rec.t_read = when[a];
            if (override_read && override_read->at == t) {
                rec.v_read = override_read->v;
                rec.t_read = override_read->t;
            }
        }
        StepEffect e = apply_step(p, s, rec.v_read);
        if (!e.ok) {
            throw RamError("invalid step " + std::to_string(t));
        }
        if (e.memory) {
            mem[e.addr] = e.v_write;
            when[e.addr] = t;
        }
        if (e.halt && !halted) {
            halted = true;
            run.halted_after = t;
            run.y = s.r[ins.a] != 0;
        }
        run.steps.push_back(rec);
        run.effects.push_back(e);
        s = e.next;
    }
    if (!halted) {
        throw RamError("step budget exceeded");
    }
    run.final_v = std::move(mem);
    run.final_t = std::move(when);
    return run;
}

size_t CanonicalProgram::size() const
{
    size_t s = 0;
    for (const auto& o : ops) {
        s += o.size();
    }
    return s;
}

CanonicalProgram canonicalize(const Program& p)
{
    CanonicalProgram c;
    for (size_t i = 0; i < p.code.size(); ++i) {
        if (is_memory_op(p.code[i].op)) {
            c.ops.push_back({{i, Flavor::ReadHalf}, {i, Flavor::WriteHalf}});
        } else {
            c.ops.push_back({{i, Flavor::Compute}});
        }
    }
    return c;
}

std::vector<RamStep> canonical_trace(const Program& p, const MachineRun& run)
{
    std::vector<RamStep> out;
    for (size_t k = 0; k < run.steps.size(); ++k) {
        const auto& rec = run.steps[k];
        const auto& e = run.effects[k];
        uint64_t t = k + 1;
        if (rec.s.pc < p.code.size() && is_memory_op(p.code[rec.s.pc].op)) {
            out.push_back({rec.s, rec.v_read, e.addr, rec.t_read, Flavor::ReadHalf});
            out.push_back({rec.s, e.v_write, e.addr, t, Flavor::WriteHalf});
        } else {
            out.push_back({rec.s, 0, 0, t, Flavor::Compute});
        }
    }
    return out;
}

bool MemTriple::operator<(const MemTriple& o) const
{
    if (a != o.a) {
        return a < o.a;
    }
    if (t != o.t) {
        return t < o.t;
    }
    return v < o.v;
}

void memory_multisets(const Program& p, const std::vector<Big>& memory, const MachineRun& run,
                      std::vector<MemTriple>& reads, std::vector<MemTriple>& writes)
{
    reads.clear();
    writes.clear();
    for (uint64_t a = 0; a < p.memory_size; ++a) {
        writes.push_back({a < memory.size() ? memory[a] : Big(0), a, 0});
        reads.push_back({run.final_v[a], a, run.final_t[a]});
    }
    for (const auto& s : canonical_trace(p, run)) {
        if (s.flavor == Flavor::ReadHalf) {
            reads.push_back({s.v, s.a, s.t});
        } else if (s.flavor == Flavor::WriteHalf) {
            writes.push_back({s.v, s.a, s.t});
        }
    }
}

} // namespace dip
