#include "warpsim/kernel_ir.hpp"

#include <cmath>

#include "warpsim/error.hpp"

namespace warpsim {

// --------------------------------------------------------------------------
// Value arithmetic
// --------------------------------------------------------------------------

bool Value::bit_equal(const Value& o) const {
    if (type != o.type) return false;
    if (is_int()) return i == o.i;
    // Compare representations, so 0.0 != -0.0 and NaN == NaN.
    std::uint64_t a, b;
    static_assert(sizeof(a) == sizeof(r));
    __builtin_memcpy(&a, &r, sizeof(a));
    __builtin_memcpy(&b, &o.r, sizeof(b));
    return a == b;
}

std::string Value::str() const {
    return is_int() ? std::to_string(i) : std::to_string(r);
}

namespace {

[[noreturn]] void fault(const char* where, const std::string& what) {
    throw FaultError(std::string(where) + ": " + what);
}

bool numeric_lt(const Value& a, const Value& b) {
    if (a.is_int() && b.is_int()) return a.i < b.i;
    return a.as_real() < b.as_real();
}

bool numeric_eq(const Value& a, const Value& b) {
    if (a.is_int() && b.is_int()) return a.i == b.i;
    return a.as_real() == b.as_real();
}

}  // namespace

Value apply_bin(BinOp op, const Value& a, const Value& b, const char* where) {
    const bool both_int = a.is_int() && b.is_int();
    switch (op) {
        case BinOp::Add:
            return both_int ? Value::integer(a.i + b.i) : Value::real(a.as_real() + b.as_real());
        case BinOp::Sub:
            return both_int ? Value::integer(a.i - b.i) : Value::real(a.as_real() - b.as_real());
        case BinOp::Mul:
            return both_int ? Value::integer(a.i * b.i) : Value::real(a.as_real() * b.as_real());
        case BinOp::Div:
            if (both_int) {
                if (b.i == 0) fault(where, "integer division by zero");
                return Value::integer(a.i / b.i);
            }
            if (b.as_real() == 0.0) fault(where, "division by zero");
            return Value::real(a.as_real() / b.as_real());
        case BinOp::Mod:
            if (both_int) {
                if (b.i == 0) fault(where, "integer modulo by zero");
                return Value::integer(a.i % b.i);
            }
            if (b.as_real() == 0.0) fault(where, "modulo by zero");
            return Value::real(std::fmod(a.as_real(), b.as_real()));
        case BinOp::Lt:
            return Value::integer(numeric_lt(a, b) ? 1 : 0);
        case BinOp::Le:
            return Value::integer(!numeric_lt(b, a) ? 1 : 0);
        case BinOp::Gt:
            return Value::integer(numeric_lt(b, a) ? 1 : 0);
        case BinOp::Ge:
            return Value::integer(!numeric_lt(a, b) ? 1 : 0);
        case BinOp::Eq:
            return Value::integer(numeric_eq(a, b) ? 1 : 0);
        case BinOp::Ne:
            return Value::integer(!numeric_eq(a, b) ? 1 : 0);
        case BinOp::And:
            return Value::integer((a.truthy() && b.truthy()) ? 1 : 0);
        case BinOp::Or:
            return Value::integer((a.truthy() || b.truthy()) ? 1 : 0);
    }
    fault(where, "unknown binary op");
}

Value apply_un(UnOp op, const Value& a, const char* where) {
    switch (op) {
        case UnOp::Neg:
            return a.is_int() ? Value::integer(-a.i) : Value::real(-a.r);
        case UnOp::Log: {
            double x = a.as_real();
            if (!(x > 0.0)) fault(where, "log of a non-positive value");
            return Value::real(std::log(x));
        }
        case UnOp::Floor: {
            if (a.is_int()) return a;
            double f = std::floor(a.r);
            if (!(f >= -9.2233720368547758e18 && f <= 9.2233720368547758e18))
                fault(where, "floor result outside the integer range");
            return Value::integer(static_cast<std::int64_t>(f));
        }
    }
    fault(where, "unknown unary op");
}

const char* bin_op_name(BinOp op) {
    switch (op) {
        case BinOp::Add: return "add";
        case BinOp::Sub: return "sub";
        case BinOp::Mul: return "mul";
        case BinOp::Div: return "div";
        case BinOp::Mod: return "mod";
        case BinOp::Lt: return "lt";
        case BinOp::Le: return "le";
        case BinOp::Gt: return "gt";
        case BinOp::Ge: return "ge";
        case BinOp::Eq: return "eq";
        case BinOp::Ne: return "ne";
        case BinOp::And: return "and";
        case BinOp::Or: return "or";
    }
    return "?";
}

const char* un_op_name(UnOp op) {
    switch (op) {
        case UnOp::Neg: return "neg";
        case UnOp::Log: return "log";
        case UnOp::Floor: return "floor";
    }
    return "?";
}

// --------------------------------------------------------------------------
// Launch geometry
// --------------------------------------------------------------------------

void validate_launch(const LaunchConfig& cfg) {
    if (cfg.blockDim.x < 1 || cfg.blockDim.y < 1 || cfg.blockDim.z < 1)
        throw DomainError("launch: blockDim components must be >= 1");
    if (cfg.gridDim.x < 1 || cfg.gridDim.y < 1)
        throw DomainError("launch: gridDim components must be >= 1");
    if (cfg.warpSize < 1 || cfg.warpSize > 64)
        throw DomainError("launch: warpSize must be in [1,64]");
}

std::optional<std::string> launch_warning(const LaunchConfig& cfg) {
    if (cfg.threads_per_block() % cfg.warpSize != 0)
        return "block size " + std::to_string(cfg.threads_per_block()) +
               " is not a multiple of warpSize " + std::to_string(cfg.warpSize) +
               "; trailing warp runs partially populated";
    return std::nullopt;
}

std::int64_t intra_block_thread_id(const ThreadCoord& t, const LaunchConfig& cfg) {
    if (t.x < 0 || t.x >= cfg.blockDim.x || t.y < 0 || t.y >= cfg.blockDim.y || t.z < 0 ||
        t.z >= cfg.blockDim.z)
        throw DomainError("thread coordinate outside blockDim");
    return t.x + cfg.blockDim.x * (t.y + cfg.blockDim.y * t.z);
}

std::int64_t linear_thread_id(const ThreadCoord& t, const BlockCoord& b, const LaunchConfig& cfg) {
    if (b.x < 0 || b.x >= cfg.gridDim.x || b.y < 0 || b.y >= cfg.gridDim.y)
        throw DomainError("block coordinate outside gridDim");
    if (t.x < 0 || t.x >= cfg.blockDim.x || t.y < 0 || t.y >= cfg.blockDim.y || t.z < 0 ||
        t.z >= cfg.blockDim.z)
        throw DomainError("thread coordinate outside blockDim");
    return t.x +
           cfg.blockDim.x *
               (t.y + cfg.blockDim.y * (t.z + cfg.blockDim.z * (b.x + cfg.gridDim.x * b.y)));
}

// --------------------------------------------------------------------------
// Program construction
// --------------------------------------------------------------------------

int KernelProgram::add_param(const std::string& name, ParamKind kind) {
    if (param_slot(name) >= 0 || local_slot(name) >= 0)
        throw DomainError("duplicate declaration: " + name);
    params.push_back({name, kind});
    return static_cast<int>(params.size()) - 1;
}

int KernelProgram::add_local(const std::string& name, ValueType type) {
    if (param_slot(name) >= 0 || local_slot(name) >= 0)
        throw DomainError("duplicate declaration: " + name);
    locals.push_back({name, type});
    return static_cast<int>(locals.size()) - 1;
}

int KernelProgram::param_slot(const std::string& name) const {
    for (std::size_t i = 0; i < params.size(); ++i)
        if (params[i].name == name) return static_cast<int>(i);
    return -1;
}

int KernelProgram::local_slot(const std::string& name) const {
    for (std::size_t i = 0; i < locals.size(); ++i)
        if (locals[i].name == name) return static_cast<int>(i);
    return -1;
}

ExprId KernelProgram::ci(std::int64_t v) {
    exprs.push_back(Expr{Expr::Kind::Const, Value::integer(v), -1, {}, {}, {}, -1, -1});
    return static_cast<ExprId>(exprs.size()) - 1;
}

ExprId KernelProgram::cr(double v) {
    exprs.push_back(Expr{Expr::Kind::Const, Value::real(v), -1, {}, {}, {}, -1, -1});
    return static_cast<ExprId>(exprs.size()) - 1;
}

ExprId KernelProgram::local(const std::string& name) {
    int slot = local_slot(name);
    if (slot < 0) throw DomainError("reference to undeclared local: " + name);
    exprs.push_back(Expr{Expr::Kind::Local, {}, slot, {}, {}, {}, -1, -1});
    return static_cast<ExprId>(exprs.size()) - 1;
}

ExprId KernelProgram::param(const std::string& name) {
    int slot = param_slot(name);
    if (slot < 0) throw DomainError("reference to undeclared param: " + name);
    if (params[slot].kind == ParamKind::Array)
        throw DomainError("array param used as a scalar: " + name);
    exprs.push_back(Expr{Expr::Kind::Param, {}, slot, {}, {}, {}, -1, -1});
    return static_cast<ExprId>(exprs.size()) - 1;
}

ExprId KernelProgram::sreg(Sreg r) {
    exprs.push_back(Expr{Expr::Kind::Special, {}, -1, r, {}, {}, -1, -1});
    return static_cast<ExprId>(exprs.size()) - 1;
}

ExprId KernelProgram::draw() {
    exprs.push_back(Expr{Expr::Kind::Draw, {}, -1, {}, {}, {}, -1, -1});
    return static_cast<ExprId>(exprs.size()) - 1;
}

ExprId KernelProgram::bin(BinOp op, ExprId a, ExprId b) {
    exprs.push_back(Expr{Expr::Kind::Bin, {}, -1, {}, op, {}, a, b});
    return static_cast<ExprId>(exprs.size()) - 1;
}

ExprId KernelProgram::un(UnOp op, ExprId a) {
    exprs.push_back(Expr{Expr::Kind::Un, {}, -1, {}, {}, op, a, -1});
    return static_cast<ExprId>(exprs.size()) - 1;
}

Statement KernelProgram::assign(const std::string& local_name, ExprId value) const {
    int slot = local_slot(local_name);
    if (slot < 0) throw DomainError("assign to undeclared local: " + local_name);
    Statement st{StmtKind::Assign, slot, value, -1, {}, {}};
    return st;
}

Statement KernelProgram::load(const std::string& local_name, const std::string& array,
                              ExprId index) const {
    int lslot = local_slot(local_name);
    int aslot = param_slot(array);
    if (lslot < 0) throw DomainError("load into undeclared local: " + local_name);
    if (aslot < 0 || params[aslot].kind != ParamKind::Array)
        throw DomainError("load from undeclared array: " + array);
    if (locals[lslot].type != ValueType::Real)
        throw DomainError("load target must be a real local: " + local_name);
    Statement st{StmtKind::Load, lslot, index, -1, {}, {}};
    st.expr_b = aslot;  // array slot rides in expr_b for loads/stores
    return st;
}

Statement KernelProgram::store(const std::string& array, ExprId index, ExprId value) const {
    int aslot = param_slot(array);
    if (aslot < 0 || params[aslot].kind != ParamKind::Array)
        throw DomainError("store to undeclared array: " + array);
    Statement st{StmtKind::Store, aslot, index, value, {}, {}};
    return st;
}

Statement KernelProgram::if_(ExprId cond, std::vector<Statement> then_body,
                             std::vector<Statement> else_body) {
    Statement st{StmtKind::If, -1, cond, -1, std::move(then_body), std::move(else_body)};
    return st;
}

Statement KernelProgram::while_(ExprId cond, std::vector<Statement> loop_body) {
    Statement st{StmtKind::While, -1, cond, -1, std::move(loop_body), {}};
    return st;
}

Statement KernelProgram::halt() {
    return Statement{StmtKind::Halt, -1, -1, -1, {}, {}};
}

namespace {

void check_expr(const KernelProgram& p, ExprId id) {
    if (id < 0 || id >= static_cast<ExprId>(p.exprs.size()))
        throw DomainError("expression reference out of range");
    const Expr& e = p.exprs[id];
    switch (e.kind) {
        case Expr::Kind::Const:
        case Expr::Kind::Draw:
        case Expr::Kind::Special:
            break;
        case Expr::Kind::Local:
            if (e.slot < 0 || e.slot >= static_cast<int>(p.locals.size()))
                throw DomainError("local reference out of range");
            break;
        case Expr::Kind::Param:
            if (e.slot < 0 || e.slot >= static_cast<int>(p.params.size()))
                throw DomainError("param reference out of range");
            if (p.params[e.slot].kind == ParamKind::Array)
                throw DomainError("array param used as a scalar: " + p.params[e.slot].name);
            break;
        case Expr::Kind::Bin:
            check_expr(p, e.a);
            check_expr(p, e.b);
            break;
        case Expr::Kind::Un:
            check_expr(p, e.a);
            break;
    }
}

void check_stmts(const KernelProgram& p, const std::vector<Statement>& stmts) {
    for (const Statement& st : stmts) {
        switch (st.kind) {
            case StmtKind::Assign:
                if (st.slot < 0 || st.slot >= static_cast<int>(p.locals.size()))
                    throw DomainError("assign target out of range");
                check_expr(p, st.expr_a);
                break;
            case StmtKind::Load:
                if (st.slot < 0 || st.slot >= static_cast<int>(p.locals.size()))
                    throw DomainError("load target out of range");
                if (st.expr_b < 0 || st.expr_b >= static_cast<ExprId>(p.params.size()) ||
                    p.params[st.expr_b].kind != ParamKind::Array)
                    throw DomainError("load source is not an array param");
                check_expr(p, st.expr_a);
                break;
            case StmtKind::Store:
                if (st.slot < 0 || st.slot >= static_cast<int>(p.params.size()) ||
                    p.params[st.slot].kind != ParamKind::Array)
                    throw DomainError("store target is not an array param");
                check_expr(p, st.expr_a);
                check_expr(p, st.expr_b);
                break;
            case StmtKind::If:
                check_expr(p, st.expr_a);
                check_stmts(p, st.body1);
                check_stmts(p, st.body2);
                break;
            case StmtKind::While:
                check_expr(p, st.expr_a);
                if (!st.body2.empty()) throw DomainError("while carries no else body");
                check_stmts(p, st.body1);
                break;
            case StmtKind::Halt:
                break;
        }
    }
}

}  // namespace

void KernelProgram::finalize() const {
    check_stmts(*this, body);
}

ParamEnv bind_params(const KernelProgram& prog, const std::map<std::string, Value>& scalars,
                     GlobalMemory& memory) {
    ParamEnv env;
    env.scalars.resize(prog.params.size());
    env.arrays.resize(prog.params.size(), nullptr);
    for (std::size_t i = 0; i < prog.params.size(); ++i) {
        const ParamDecl& p = prog.params[i];
        if (p.kind == ParamKind::Array) {
            auto it = memory.arrays.find(p.name);
            if (it == memory.arrays.end())
                throw DomainError("no array bound for param: " + p.name);
            env.arrays[i] = &it->second;
        } else {
            auto it = scalars.find(p.name);
            if (it == scalars.end())
                throw DomainError("no value bound for param: " + p.name);
            if (p.kind == ParamKind::Int && !it->second.is_int())
                throw DomainError("param expects an integer: " + p.name);
            Value v = it->second;
            if (p.kind == ParamKind::Real && v.is_int()) v = Value::real(v.as_real());
            env.scalars[i] = v;
        }
    }
    return env;
}

}  // namespace warpsim
