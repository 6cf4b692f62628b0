#include "warpsim/warp_exec.hpp"

#include <bit>
#include <utility>

#include "warpsim/error.hpp"

namespace warpsim {

namespace {

int popcount(std::uint64_t m) { return std::popcount(m); }

Value coerce_local(const LocalDecl& decl, const Value& v) {
    if (decl.type == ValueType::Int) {
        if (!v.is_int()) {
            throw FaultError("assign: real value into int local '" + decl.name + "'");
        }
        return v;
    }
    return Value::real(v.as_real());
}

std::int64_t sreg_value(Sreg r, const ThreadCoord& t, const BlockCoord& b,
                        const LaunchConfig& cfg) {
    switch (r) {
        case Sreg::TidX: return t.x;
        case Sreg::TidY: return t.y;
        case Sreg::TidZ: return t.z;
        case Sreg::BidX: return b.x;
        case Sreg::BidY: return b.y;
        case Sreg::BDimX: return cfg.blockDim.x;
        case Sreg::BDimY: return cfg.blockDim.y;
        case Sreg::BDimZ: return cfg.blockDim.z;
        case Sreg::GDimX: return cfg.gridDim.x;
        case Sreg::GDimY: return cfg.gridDim.y;
        case Sreg::WarpSize: return cfg.warpSize;
    }
    throw DomainError("unknown special register");
}

}  // namespace

void WarpRunStats::add(const IssueRecord& rec) {
    issues += 1;
    if (rec.mem_read) {
        mem_reads += 1;
    } else if (rec.mem_write) {
        mem_writes += 1;
    } else {
        alu_issues += 1;
    }
    divergence_events += rec.divergence ? 1 : 0;
    if (static_cast<std::uint64_t>(rec.active_lanes) > max_active_lanes) {
        max_active_lanes = static_cast<std::uint64_t>(rec.active_lanes);
    }
}

WarpState::WarpState(const KernelProgram& prog, const LaunchConfig& cfg, BlockCoord block,
                     std::int64_t warp_in_block, std::vector<RngState> lane_streams,
                     const std::map<std::string, Value>& initial_locals, int max_depth)
    : prog_(&prog), cfg_(cfg), block_(block), max_depth_(max_depth) {
    validate_launch(cfg);
    if (warp_in_block < 0 || warp_in_block >= cfg.warps_per_block()) {
        throw DomainError("warp index " + std::to_string(warp_in_block) +
                          " outside block of " + std::to_string(cfg.warps_per_block()) +
                          " warps");
    }
    if (max_depth_ < 1 || max_depth_ > 64) {
        throw DomainError("mask stack depth must be in [1, 64]");
    }

    lane_count_ = cfg.warpSize;
    const std::int64_t tpb = cfg.threads_per_block();
    lanes_.resize(lane_count_);
    for (int l = 0; l < lane_count_; ++l) {
        const std::int64_t tid = warp_in_block * cfg.warpSize + l;
        if (tid >= tpb) continue;  // partial trailing warp
        std::int64_t rem = tid;
        lanes_[l].coord.x = rem % cfg.blockDim.x;
        rem /= cfg.blockDim.x;
        lanes_[l].coord.y = rem % cfg.blockDim.y;
        lanes_[l].coord.z = rem / cfg.blockDim.y;
        entry_mask_ |= std::uint64_t{1} << l;
    }

    const std::size_t nlocals = prog.locals.size();
    regs_.resize(static_cast<std::size_t>(lane_count_) * nlocals);
    for (std::size_t s = 0; s < nlocals; ++s) {
        const Value init = prog.locals[s].type == ValueType::Int ? Value::integer(0)
                                                                 : Value::real(0.0);
        for (int l = 0; l < lane_count_; ++l) {
            regs_[static_cast<std::size_t>(l) * nlocals + s] = init;
        }
    }
    for (const auto& [name, v] : initial_locals) {
        const int slot = prog.local_slot(name);
        if (slot < 0) throw DomainError("initial value for undeclared local '" + name + "'");
        const Value coerced = coerce_local(prog.locals[slot], v);
        for (int l = 0; l < lane_count_; ++l) {
            regs_[static_cast<std::size_t>(l) * nlocals + slot] = coerced;
        }
    }

    if (static_cast<int>(lane_streams.size()) > lane_count_) {
        throw DomainError("more RNG streams than lanes");
    }
    rng_ = std::move(lane_streams);
    rng_.resize(lane_count_);
    draw_counts_.assign(lane_count_, 0);

    if (entry_mask_ != 0) {
        frames_.push_back(Frame{&prog.body, 0, entry_mask_, Frame::Kind::Top, nullptr, 0, false});
    } else {
        done_ = true;
    }
}

std::uint64_t WarpState::current_mask() const {
    if (frames_.empty()) return 0;
    return frames_.back().mask & ~halted_;
}

const Value& WarpState::reg(int lane, int local_slot) const {
    return regs_[static_cast<std::size_t>(lane) * prog_->locals.size() + local_slot];
}

Value WarpState::eval(ExprId id, int lane, const ParamEnv& env) {
    const Expr& e = prog_->exprs[id];
    switch (e.kind) {
        case Expr::Kind::Const:
            return e.konst;
        case Expr::Kind::Local:
            return regs_[static_cast<std::size_t>(lane) * prog_->locals.size() + e.slot];
        case Expr::Kind::Param:
            return env.scalars[e.slot];
        case Expr::Kind::Special:
            return Value::integer(sreg_value(e.sreg, lanes_[lane].coord, block_, cfg_));
        case Expr::Kind::Draw:
            draw_counts_[lane] += 1;
            return Value::real(uniform01(rng_[lane]));
        case Expr::Kind::Bin: {
            const Value a = eval(e.a, lane, env);
            const Value b = eval(e.b, lane, env);
            return apply_bin(e.bop, a, b, "kernel");
        }
        case Expr::Kind::Un: {
            const Value a = eval(e.a, lane, env);
            return apply_un(e.uop, a, "kernel");
        }
    }
    throw DomainError("unknown expression kind");
}

std::pair<std::uint64_t, std::uint64_t> WarpState::split_mask(ExprId cond, std::uint64_t mask,
                                                              const ParamEnv& env) {
    std::uint64_t taken = 0, fallthrough = 0;
    for (int l = 0; l < lane_count_; ++l) {
        const std::uint64_t bit = std::uint64_t{1} << l;
        if (!(mask & bit)) continue;
        if (eval(cond, l, env).truthy()) {
            taken |= bit;
        } else {
            fallthrough |= bit;
        }
    }
    return {taken, fallthrough};
}

void WarpState::push_frame(Frame f) {
    if (static_cast<int>(frames_.size()) >= max_depth_) {
        throw FaultError("mask stack overflow: nesting deeper than " +
                         std::to_string(max_depth_) + " levels");
    }
    frames_.push_back(std::move(f));
}

std::optional<IssueRecord> WarpState::step(const ParamEnv& env) {
    if (done_) return std::nullopt;

    for (;;) {
        if (frames_.empty()) {
            done_ = true;
            return std::nullopt;
        }
        Frame& f = frames_.back();
        f.mask &= ~halted_;

        if (f.mask == 0 || f.next >= f.stmts->size()) {
            // Block finished (or every lane in it halted): run the pending
            // else-side, re-test a loop, or reconverge into the parent.
            if (f.kind == Frame::Kind::Then && f.else_pending) {
                f.else_pending = false;
                const std::uint64_t em = f.else_mask & ~halted_;
                if (em != 0) {
                    f.stmts = &f.owner->body2;
                    f.next = 0;
                    f.mask = em;
                    f.kind = Frame::Kind::Else;
                    continue;
                }
            }
            if (f.kind == Frame::Kind::Loop && f.mask != 0 && f.next >= f.stmts->size()) {
                const Statement& w = *f.owner;
                auto [again, leave] = split_mask(w.expr_a, f.mask, env);
                IssueRecord rec{StmtKind::While, popcount(f.mask),
                                again != 0 && leave != 0 && !w.body1.empty(), false, false};
                if (again == 0) {
                    frames_.pop_back();
                } else {
                    f.mask = again;
                    f.next = 0;
                }
                return rec;
            }
            frames_.pop_back();
            continue;
        }

        const Statement& st = (*f.stmts)[f.next];
        const int active = popcount(f.mask);
        const std::size_t nlocals = prog_->locals.size();

        switch (st.kind) {
            case StmtKind::Assign: {
                f.next += 1;
                for (int l = 0; l < lane_count_; ++l) {
                    if (!(f.mask & (std::uint64_t{1} << l))) continue;
                    const Value v = eval(st.expr_a, l, env);
                    regs_[static_cast<std::size_t>(l) * nlocals + st.slot] =
                        coerce_local(prog_->locals[st.slot], v);
                }
                return IssueRecord{StmtKind::Assign, active, false, false, false};
            }
            case StmtKind::Load: {
                f.next += 1;
                std::vector<double>& arr = *env.arrays[st.expr_b];
                for (int l = 0; l < lane_count_; ++l) {
                    if (!(f.mask & (std::uint64_t{1} << l))) continue;
                    const Value idx = eval(st.expr_a, l, env);
                    if (!idx.is_int()) throw FaultError("load: non-integer index");
                    if (idx.i < 0 || idx.i >= static_cast<std::int64_t>(arr.size())) {
                        throw FaultError("load: index " + std::to_string(idx.i) +
                                         " out of bounds for array of " +
                                         std::to_string(arr.size()));
                    }
                    regs_[static_cast<std::size_t>(l) * nlocals + st.slot] =
                        Value::real(arr[idx.i]);
                }
                return IssueRecord{StmtKind::Load, active, false, true, false};
            }
            case StmtKind::Store: {
                f.next += 1;
                std::vector<double>& arr = *env.arrays[st.slot];
                for (int l = 0; l < lane_count_; ++l) {
                    if (!(f.mask & (std::uint64_t{1} << l))) continue;
                    const Value idx = eval(st.expr_a, l, env);
                    if (!idx.is_int()) throw FaultError("store: non-integer index");
                    if (idx.i < 0 || idx.i >= static_cast<std::int64_t>(arr.size())) {
                        throw FaultError("store: index " + std::to_string(idx.i) +
                                         " out of bounds for array of " +
                                         std::to_string(arr.size()));
                    }
                    arr[idx.i] = eval(st.expr_b, l, env).as_real();
                }
                return IssueRecord{StmtKind::Store, active, false, false, true};
            }
            case StmtKind::Halt: {
                f.next += 1;
                halted_ |= f.mask;
                return IssueRecord{StmtKind::Halt, active, false, false, false};
            }
            case StmtKind::If: {
                f.next += 1;
                auto [taken, other] = split_mask(st.expr_a, f.mask, env);
                const bool event =
                    taken != 0 && other != 0 && !st.body1.empty() && !st.body2.empty();
                if (taken != 0 && !st.body1.empty()) {
                    push_frame(Frame{&st.body1, 0, taken, Frame::Kind::Then, &st, other,
                                     other != 0 && !st.body2.empty()});
                } else if (other != 0 && !st.body2.empty()) {
                    push_frame(Frame{&st.body2, 0, other, Frame::Kind::Else, &st, 0, false});
                }
                return IssueRecord{StmtKind::If, active, event, false, false};
            }
            case StmtKind::While: {
                f.next += 1;
                auto [enter, skip] = split_mask(st.expr_a, f.mask, env);
                const bool event = enter != 0 && skip != 0 && !st.body1.empty();
                if (enter != 0 && !st.body1.empty()) {
                    push_frame(Frame{&st.body1, 0, enter, Frame::Kind::Loop, &st, 0, false});
                }
                return IssueRecord{StmtKind::While, active, event, false, false};
            }
        }
        throw DomainError("unknown statement kind");
    }
}

WarpRunStats run_warp(WarpState& warp, const ParamEnv& env) {
    WarpRunStats stats;
    while (auto rec = warp.step(env)) {
        stats.add(*rec);
    }
    return stats;
}

WarpRunStats run_single_thread(const KernelProgram& prog, const ParamEnv& env, RngState stream,
                               const std::map<std::string, Value>& initial_locals) {
    LaunchConfig cfg;
    cfg.blockDim = {1, 1, 1};
    cfg.gridDim = {1, 1};
    cfg.warpSize = 1;
    WarpState warp(prog, cfg, BlockCoord{0, 0}, 0, {stream}, initial_locals);
    return run_warp(warp, env);
}

}  // namespace warpsim
