#pragma once

#include "dip/field.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dip {

// Four registers of words mod a prime W. LOAD/STORE address memory at
// reg + imm, computed over the integers; nothing else touches memory.
enum class Op : uint8_t { LOADI, LOAD, STORE, ADD, SUB, MUL, CMPLT, JNZ, HALT01 };

struct Instr {
    Op op = Op::HALT01;
    // LOADI: a=rd. LOAD: a=rd, b=ra. STORE: a=rs, b=ra. ALU: a=rd, b=rx, c=ry.
    // JNZ: a=r, imm=target. HALT01: a=r.
    uint8_t a = 0;
    uint8_t b = 0;
    uint8_t c = 0;
    Big imm = 0;
    bool operator==(const Instr&) const = default;
};

constexpr int kRegisters = 4;

class RamError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Program {
    std::vector<Instr> code;
    Field word;
    uint64_t memory_size = 0;

    unsigned pc_bits() const { return width_for(static_cast<uint64_t>(code.size())); }
    unsigned word_bits() const { return word.bits(); }
    unsigned addr_bits() const { return width_for(memory_size); }
};

// One label per line allowed ("name:"), '#' comments, registers r0..r3.
Program assemble(const std::string& text, const Field& word, uint64_t memory_size);
std::string disassemble(const Program& p);
bool is_memory_op(Op op);

struct MachineState {
    uint64_t pc = 0;
    std::array<Big, kRegisters> r{};
    bool operator==(const MachineState&) const = default;
};

// C_j: the effect of executing the instruction at s.pc on state s when a
// memory instruction reads v_read.
struct StepEffect {
    bool ok = true;       // false: bad pc, bad register value, address out of range
    MachineState next;
    bool memory = false;
    uint64_t addr = 0;
    Big v_write = 0;
    bool halt = false;
};

StepEffect apply_step(const Program& p, const MachineState& s, const Big& v_read);

// What the prover hands a node per step: the state before the step and, for
// memory steps, the value read and the time it was last written.
struct StepRecord {
    MachineState s;
    Big v_read = 0;
    uint64_t t_read = 0;
    bool operator==(const StepRecord&) const = default;
};

// A forced read: at step `at` (1-based), the memory read returns (v, t).
struct ReadOverride {
    uint64_t at = 0;
    Big v = 0;
    uint64_t t = 0;
};

struct MachineRun {
    // steps[t-1] is step t; padded with HALT01 self-loops to the budget.
    std::vector<StepRecord> steps;
    std::vector<StepEffect> effects;
    std::vector<Big> final_v;
    std::vector<uint64_t> final_t;
    uint64_t halted_after = 0;  // steps until the first HALT01 executed
    bool y = false;
};

// Runs from pc 0 with zero registers; memory[a] is written at time 0.
// Throws RamError when the budget runs out or an access is out of range.
MachineRun run_machine(const Program& p, const std::vector<Big>& memory, uint64_t budget,
                       std::optional<ReadOverride> override_read = {});

// Canonical form: each instruction index becomes a list of halves.
enum class Flavor : uint8_t { Compute, ReadHalf, WriteHalf };

struct CanonicalOp {
    size_t instr = 0;
    Flavor flavor = Flavor::Compute;
};

struct CanonicalProgram {
    std::vector<std::vector<CanonicalOp>> ops;  // one list per instruction
    size_t size() const;
};

// LOAD becomes read (v', t') then rewrite (v', t); STORE becomes read
// (v', t') then write (v, t); everything else stays one compute half.
CanonicalProgram canonicalize(const Program& p);

// A tuple of the canonical trace.
struct RamStep {
    MachineState s;
    Big v = 0;
    uint64_t a = 0;
    uint64_t t = 0;
    Flavor flavor = Flavor::Compute;
};

std::vector<RamStep> canonical_trace(const Program& p, const MachineRun& run);

struct MemTriple {
    Big v;
    uint64_t a;
    uint64_t t;
    bool operator<(const MemTriple& o) const;
    bool operator==(const MemTriple&) const = default;
};

// R and W of a run including the time-0 initial writes and the final reads.
void memory_multisets(const Program& p, const std::vector<Big>& memory, const MachineRun& run,
                      std::vector<MemTriple>& reads, std::vector<MemTriple>& writes);

} // namespace dip
