#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "warpsim/value.hpp"

namespace warpsim {

// ---------------------------------------------------------------------------
// Launch geometry
// ---------------------------------------------------------------------------

struct Dim3 {
    std::int64_t x = 1, y = 1, z = 1;
    bool operator==(const Dim3&) const = default;
};

struct Dim2 {
    std::int64_t x = 1, y = 1;
    bool operator==(const Dim2&) const = default;
};

struct ThreadCoord {
    std::int64_t x = 0, y = 0, z = 0;
};

struct BlockCoord {
    std::int64_t x = 0, y = 0;
};

struct LaunchConfig {
    Dim3 blockDim;
    Dim2 gridDim;
    int warpSize = 32;

    std::int64_t threads_per_block() const { return blockDim.x * blockDim.y * blockDim.z; }
    std::int64_t total_blocks() const { return gridDim.x * gridDim.y; }
    std::int64_t warps_per_block() const {
        return (threads_per_block() + warpSize - 1) / warpSize;
    }
};

// Throws DomainError on non-positive dimensions or warpSize outside [1,64].
void validate_launch(const LaunchConfig& cfg);

// Warning (not an error) when the block shape packs warps that straddle
// hardware boundaries, i.e. threads_per_block is not a multiple of warpSize.
std::optional<std::string> launch_warning(const LaunchConfig& cfg);

// Row-major global thread linearization; bounds-checked against cfg.
std::int64_t linear_thread_id(const ThreadCoord& t, const BlockCoord& b, const LaunchConfig& cfg);

// Thread linearization within one block (no block/grid term).
std::int64_t intra_block_thread_id(const ThreadCoord& t, const LaunchConfig& cfg);

// ---------------------------------------------------------------------------
// Kernel programs
// ---------------------------------------------------------------------------

enum class Sreg {
    TidX, TidY, TidZ,
    BidX, BidY,
    BDimX, BDimY, BDimZ,
    GDimX, GDimY,
    WarpSize,
};

enum class ParamKind { Int, Real, Array };

struct ParamDecl {
    std::string name;
    ParamKind kind;
};

struct LocalDecl {
    std::string name;
    ValueType type;
};

using ExprId = std::int32_t;

struct Expr {
    enum class Kind { Const, Local, Param, Special, Draw, Bin, Un };
    Kind kind = Kind::Const;
    Value konst;        // Const
    int slot = -1;      // Local / Param
    Sreg sreg{};        // Special
    BinOp bop{};        // Bin
    UnOp uop{};         // Un
    ExprId a = -1, b = -1;
};

enum class StmtKind { Assign, Load, Store, If, While, Halt };

struct Statement {
    StmtKind kind;
    int slot = -1;              // Assign/Load target local; Load/Store array param
    ExprId expr_a = -1;         // Assign value, Load/Store index, If/While condition
    ExprId expr_b = -1;         // Store value
    std::vector<Statement> body1;  // If-then / While body
    std::vector<Statement> body2;  // If-else
};

// A structured kernel: declarations plus a statement tree over an expression
// arena. Build with the helper methods, then finalize() before executing.
struct KernelProgram {
    std::vector<ParamDecl> params;
    std::vector<LocalDecl> locals;
    std::vector<Expr> exprs;
    std::vector<Statement> body;

    int add_param(const std::string& name, ParamKind kind);
    int add_local(const std::string& name, ValueType type);
    int param_slot(const std::string& name) const;  // -1 when absent
    int local_slot(const std::string& name) const;

    ExprId ci(std::int64_t v);
    ExprId cr(double v);
    ExprId local(const std::string& name);
    ExprId param(const std::string& name);
    ExprId sreg(Sreg r);
    ExprId draw();
    ExprId bin(BinOp op, ExprId a, ExprId b);
    ExprId un(UnOp op, ExprId a);

    Statement assign(const std::string& local, ExprId value) const;
    Statement load(const std::string& local, const std::string& array, ExprId index) const;
    Statement store(const std::string& array, ExprId index, ExprId value) const;
    static Statement if_(ExprId cond, std::vector<Statement> then_body,
                         std::vector<Statement> else_body = {});
    static Statement while_(ExprId cond, std::vector<Statement> loop_body);
    static Statement halt();

    // Structural validation: every reference resolves, types line up.
    // Throws DomainError. Idempotent.
    void finalize() const;
};

// ---------------------------------------------------------------------------
// Execution context shared by all warps of a launch
// ---------------------------------------------------------------------------

struct GlobalMemory {
    std::map<std::string, std::vector<double>> arrays;
};

// Scalar parameter values plus array bindings resolved against a memory
// instance; indexed by parameter slot.
struct ParamEnv {
    std::vector<Value> scalars;
    std::vector<std::vector<double>*> arrays;
};

ParamEnv bind_params(const KernelProgram& prog, const std::map<std::string, Value>& scalars,
                     GlobalMemory& memory);

}  // namespace warpsim
