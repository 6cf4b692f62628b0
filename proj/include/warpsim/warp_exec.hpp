#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "warpsim/kernel_ir.hpp"
#include "warpsim/rng.hpp"

namespace warpsim {

// One issued statement. Composite statements issue once per condition test;
// their bodies issue separately. A divergence event is a condition that
// splits the active mask into two non-empty halves with real work on both
// serialized paths.
struct IssueRecord {
    StmtKind kind;
    int active_lanes = 0;
    bool divergence = false;
    bool mem_read = false;
    bool mem_write = false;
};

struct WarpRunStats {
    std::uint64_t issues = 0;
    std::uint64_t alu_issues = 0;
    std::uint64_t mem_reads = 0;
    std::uint64_t mem_writes = 0;
    std::uint64_t divergence_events = 0;
    std::uint64_t max_active_lanes = 0;

    void add(const IssueRecord& rec);
};

// SIMT warp: all lanes share one program position; divergence is handled
// with a stack of (statement list, position, mask) frames. Then-side runs
// before the else-side; reconvergence restores the pre-branch mask minus
// permanently halted lanes.
class WarpState {
  public:
    WarpState(const KernelProgram& prog, const LaunchConfig& cfg, BlockCoord block,
              std::int64_t warp_in_block, std::vector<RngState> lane_streams,
              const std::map<std::string, Value>& initial_locals = {}, int max_depth = 32);

    // Issues exactly one statement; returns nothing once the warp has halted.
    std::optional<IssueRecord> step(const ParamEnv& env);

    bool done() const { return done_; }
    std::uint64_t current_mask() const;
    std::uint64_t entry_mask() const { return entry_mask_; }
    std::uint64_t halted_mask() const { return halted_; }
    int lane_count() const { return lane_count_; }

    const Value& reg(int lane, int local_slot) const;
    std::uint64_t draws(int lane) const { return draw_counts_[lane]; }

  private:
    struct Frame {
        const std::vector<Statement>* stmts;
        std::size_t next;
        std::uint64_t mask;
        enum class Kind { Top, Then, Else, Loop } kind;
        const Statement* owner;
        std::uint64_t else_mask;
        bool else_pending;
    };

    struct LaneInfo {
        ThreadCoord coord;
    };

    Value eval(ExprId id, int lane, const ParamEnv& env);
    std::pair<std::uint64_t, std::uint64_t> split_mask(ExprId cond, std::uint64_t mask,
                                                       const ParamEnv& env);
    void push_frame(Frame f);

    const KernelProgram* prog_;
    LaunchConfig cfg_;
    BlockCoord block_;
    int lane_count_;
    int max_depth_;
    std::uint64_t entry_mask_ = 0;
    std::uint64_t halted_ = 0;
    bool done_ = false;
    std::vector<LaneInfo> lanes_;
    std::vector<Value> regs_;  // lane-major [lane * nlocals + slot]
    std::vector<RngState> rng_;
    std::vector<std::uint64_t> draw_counts_;
    std::vector<Frame> frames_;
};

// Drives a warp to completion, folding the issue stream into totals.
WarpRunStats run_warp(WarpState& warp, const ParamEnv& env);

// Executes a program on a single-thread launch (one lane, warpSize 1);
// used for unit-cost accounting of model bodies.
WarpRunStats run_single_thread(const KernelProgram& prog, const ParamEnv& env, RngState stream,
                               const std::map<std::string, Value>& initial_locals = {});

}  // namespace warpsim
