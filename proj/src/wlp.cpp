#include "warpsim/wlp.hpp"

#include <algorithm>

#include "warpsim/error.hpp"

namespace warpsim {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// t.x + bdim.x*(t.y + bdim.y*(t.z + bdim.z*(bid.x + gdim.x*bid.y)))
ExprId linear_tid_expr(KernelProgram& p) {
    ExprId block_lin = p.bin(BinOp::Add, p.sreg(Sreg::BidX),
                             p.bin(BinOp::Mul, p.sreg(Sreg::GDimX), p.sreg(Sreg::BidY)));
    ExprId z_term = p.bin(BinOp::Add, p.sreg(Sreg::TidZ),
                          p.bin(BinOp::Mul, p.sreg(Sreg::BDimZ), block_lin));
    ExprId y_term = p.bin(BinOp::Add, p.sreg(Sreg::TidY),
                          p.bin(BinOp::Mul, p.sreg(Sreg::BDimY), z_term));
    return p.bin(BinOp::Add, p.sreg(Sreg::TidX),
                 p.bin(BinOp::Mul, p.sreg(Sreg::BDimX), y_term));
}

// t.x + bdim.x*(t.y + bdim.y*t.z) — no block/grid term
ExprId intra_tid_expr(KernelProgram& p) {
    ExprId y_term = p.bin(BinOp::Add, p.sreg(Sreg::TidY),
                          p.bin(BinOp::Mul, p.sreg(Sreg::BDimY), p.sreg(Sreg::TidZ)));
    return p.bin(BinOp::Add, p.sreg(Sreg::TidX),
                 p.bin(BinOp::Mul, p.sreg(Sreg::BDimX), y_term));
}

void check_wrappable(const KernelProgram& body) {
    const int rid = body.local_slot("rid");
    if (rid < 0 || body.locals[rid].type != ValueType::Int)
        throw DomainError("wrap: body must declare an Int local 'rid'");
    const int reps = body.param_slot("replications");
    if (reps < 0 || body.params[reps].kind != ParamKind::Int)
        throw DomainError("wrap: body must declare an Int param 'replications'");
    if (!body.body.empty() && body.body.front().kind == StmtKind::Assign &&
        body.body.front().slot == rid)
        throw DomainError("wrap: body already initializes 'rid' — double wrap");
}

}  // namespace

const char* mode_name(ExecutionMode mode) {
    switch (mode) {
        case ExecutionMode::Sequential: return "sequential";
        case ExecutionMode::Tlp: return "tlp";
        case ExecutionMode::Wlp: return "wlp";
    }
    return "?";
}

ExecutionMode mode_from_name(const std::string& name) {
    if (name == "sequential") return ExecutionMode::Sequential;
    if (name == "tlp") return ExecutionMode::Tlp;
    if (name == "wlp") return ExecutionMode::Wlp;
    throw DomainError("unknown execution mode '" + name + "' (sequential|tlp|wlp)");
}

std::int64_t warp_index(const ThreadCoord& t, const BlockCoord& b, const LaunchConfig& cfg) {
    return linear_thread_id(t, b, cfg) / cfg.warpSize;
}

bool is_warp_leader(const ThreadCoord& t, const LaunchConfig& cfg) {
    return intra_block_thread_id(t, cfg) % cfg.warpSize == 0;
}

LaunchPlan plan_launch(std::int64_t replications, ExecutionMode mode, const DeviceProfile& prof,
                       int tlp_block_size, std::int64_t grid_limit) {
    if (replications < 1) throw PlanError("plan_launch: need at least one replication");
    if (tlp_block_size < 1) throw PlanError("plan_launch: tlp_block_size must be >= 1");
    if (tlp_block_size > prof.maxThreadsPerBlock)
        throw PlanError("plan_launch: tlp_block_size exceeds maxThreadsPerBlock");

    LaunchPlan plan;
    plan.replications = replications;
    plan.mode = mode;
    LaunchConfig cfg;  // warpSize stays at its default
    switch (mode) {
        case ExecutionMode::Sequential:
            cfg.blockDim = {1, 1, 1};
            cfg.gridDim = {1, 1};
            cfg.warpSize = 1;
            break;
        case ExecutionMode::Wlp:
            cfg.blockDim = {cfg.warpSize, 1, 1};
            cfg.gridDim = {replications, 1};
            break;
        case ExecutionMode::Tlp:
            cfg.blockDim = {std::min<std::int64_t>(replications, tlp_block_size), 1, 1};
            cfg.gridDim = {ceil_div(replications, cfg.blockDim.x), 1};
            break;
    }
    if (cfg.gridDim.x > grid_limit || cfg.gridDim.y > grid_limit)
        throw PlanError("plan_launch: " + std::to_string(replications) +
                        " replications exceed the grid limit of " + std::to_string(grid_limit) +
                        " blocks per dimension");
    validate_launch(cfg);
    plan.cfg = cfg;
    plan.warning = launch_warning(cfg);
    return plan;
}

KernelProgram wrap_wlp(const KernelProgram& body) {
    check_wrappable(body);
    KernelProgram p = body;

    Statement init = p.assign("rid", p.bin(BinOp::Div, linear_tid_expr(p), p.sreg(Sreg::WarpSize)));
    ExprId not_leader =
        p.bin(BinOp::Ne, p.bin(BinOp::Mod, intra_tid_expr(p), p.sreg(Sreg::WarpSize)), p.ci(0));
    ExprId in_range = p.bin(BinOp::Lt, p.local("rid"), p.param("replications"));

    std::vector<Statement> inner = std::move(p.body);
    p.body.clear();
    p.body.push_back(std::move(init));
    p.body.push_back(KernelProgram::if_(not_leader, {KernelProgram::halt()}));
    p.body.push_back(KernelProgram::if_(in_range, std::move(inner)));
    p.finalize();
    return p;
}

KernelProgram wrap_tlp(const KernelProgram& body) {
    check_wrappable(body);
    KernelProgram p = body;

    Statement init = p.assign("rid", linear_tid_expr(p));
    ExprId in_range = p.bin(BinOp::Lt, p.local("rid"), p.param("replications"));

    std::vector<Statement> inner = std::move(p.body);
    p.body.clear();
    p.body.push_back(std::move(init));
    p.body.push_back(KernelProgram::if_(in_range, std::move(inner)));
    p.finalize();
    return p;
}

std::vector<RngState> assign_lane_streams(ExecutionMode mode, const LaunchConfig& cfg,
                                          const std::vector<RngState>& replication_streams) {
    if (mode == ExecutionMode::Sequential) return replication_streams;
    const std::int64_t n = static_cast<std::int64_t>(replication_streams.size());
    if (n == 0) return {};
    std::vector<RngState> lanes;
    if (mode == ExecutionMode::Wlp) {
        lanes.resize((n - 1) * cfg.warpSize + 1);
        for (std::int64_t r = 0; r < n; ++r) lanes[r * cfg.warpSize] = replication_streams[r];
    } else {
        lanes = replication_streams;
    }
    return lanes;
}

}  // namespace warpsim
