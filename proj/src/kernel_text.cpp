#include "warpsim/kernel_text.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <utility>

#include "warpsim/error.hpp"

namespace warpsim {

namespace {

constexpr std::array<std::pair<Sreg, const char*>, 11> kSregTokens{{
    {Sreg::TidX, "tid.x"},
    {Sreg::TidY, "tid.y"},
    {Sreg::TidZ, "tid.z"},
    {Sreg::BidX, "bid.x"},
    {Sreg::BidY, "bid.y"},
    {Sreg::BDimX, "bdim.x"},
    {Sreg::BDimY, "bdim.y"},
    {Sreg::BDimZ, "bdim.z"},
    {Sreg::GDimX, "gdim.x"},
    {Sreg::GDimY, "gdim.y"},
    {Sreg::WarpSize, "warpsize"},
}};

const char* sreg_token(Sreg r) {
    for (const auto& [reg, tok] : kSregTokens)
        if (reg == r) return tok;
    return "?";
}

bool is_sreg_token(const std::string& s, Sreg& out) {
    for (const auto& [reg, tok] : kSregTokens) {
        if (s == tok) {
            out = reg;
            return true;
        }
    }
    return false;
}

bool valid_ident(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    Sreg dummy;
    return !is_sreg_token(s, dummy);
}

std::string real_token(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
    return s;
}

// ---- dump ----------------------------------------------------------------

void write_expr(std::string& out, const KernelProgram& p, ExprId id) {
    const Expr& e = p.exprs[id];
    switch (e.kind) {
        case Expr::Kind::Const:
            out += e.konst.is_int() ? std::to_string(e.konst.i) : real_token(e.konst.r);
            return;
        case Expr::Kind::Local:
            out += p.locals[e.slot].name;
            return;
        case Expr::Kind::Param:
            out += p.params[e.slot].name;
            return;
        case Expr::Kind::Special:
            out += sreg_token(e.sreg);
            return;
        case Expr::Kind::Draw:
            out += "(draw)";
            return;
        case Expr::Kind::Bin:
            out += '(';
            out += bin_op_name(e.bop);
            out += ' ';
            write_expr(out, p, e.a);
            out += ' ';
            write_expr(out, p, e.b);
            out += ')';
            return;
        case Expr::Kind::Un:
            out += '(';
            out += un_op_name(e.uop);
            out += ' ';
            write_expr(out, p, e.a);
            out += ')';
            return;
    }
}

void write_stmts(std::string& out, const KernelProgram& p, const std::vector<Statement>& body,
                 int indent);

void write_stmt(std::string& out, const KernelProgram& p, const Statement& st, int indent) {
    const std::string pad(indent, ' ');
    switch (st.kind) {
        case StmtKind::Assign:
            out += pad + "(assign " + p.locals[st.slot].name + " ";
            write_expr(out, p, st.expr_a);
            out += ")";
            return;
        case StmtKind::Load:
            out += pad + "(load " + p.locals[st.slot].name + " " + p.params[st.expr_b].name + " ";
            write_expr(out, p, st.expr_a);
            out += ")";
            return;
        case StmtKind::Store:
            out += pad + "(store " + p.params[st.slot].name + " ";
            write_expr(out, p, st.expr_a);
            out += " ";
            write_expr(out, p, st.expr_b);
            out += ")";
            return;
        case StmtKind::Halt:
            out += pad + "(halt)";
            return;
        case StmtKind::If:
            out += pad + "(if ";
            write_expr(out, p, st.expr_a);
            out += "\n" + pad + "  (then";
            write_stmts(out, p, st.body1, indent + 4);
            out += ")";
            if (!st.body2.empty()) {
                out += "\n" + pad + "  (else";
                write_stmts(out, p, st.body2, indent + 4);
                out += ")";
            }
            out += ")";
            return;
        case StmtKind::While:
            out += pad + "(while ";
            write_expr(out, p, st.expr_a);
            write_stmts(out, p, st.body1, indent + 2);
            out += ")";
            return;
    }
}

void write_stmts(std::string& out, const KernelProgram& p, const std::vector<Statement>& body,
                 int indent) {
    for (const Statement& st : body) {
        out += "\n";
        write_stmt(out, p, st, indent);
    }
}

// ---- parse ---------------------------------------------------------------

struct Sx {
    bool atom = false;
    std::string text;  // atom payload
    std::vector<Sx> items;
    int line = 0;
};

[[noreturn]] void err(int line, const std::string& what) {
    throw ParseError("line " + std::to_string(line) + ": " + what);
}

std::vector<Sx> tokenize_list(const std::string& text) {
    std::vector<Sx> stack;
    stack.push_back({});  // virtual root
    int line = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == ';') {
            while (i < n && text[i] != '\n') ++i;
        } else if (c == '(') {
            Sx sx;
            sx.line = line;
            stack.push_back(std::move(sx));
            ++i;
        } else if (c == ')') {
            if (stack.size() < 2) err(line, "unmatched ')'");
            Sx done = std::move(stack.back());
            stack.pop_back();
            stack.back().items.push_back(std::move(done));
            ++i;
        } else {
            std::size_t start = i;
            while (i < n && !std::isspace(static_cast<unsigned char>(text[i])) &&
                   text[i] != '(' && text[i] != ')' && text[i] != ';')
                ++i;
            Sx sx;
            sx.atom = true;
            sx.text = text.substr(start, i - start);
            sx.line = line;
            stack.back().items.push_back(std::move(sx));
        }
    }
    if (stack.size() != 1) err(line, "unterminated '('");
    return std::move(stack.back().items);
}

const std::string& head(const Sx& sx) {
    static const std::string empty;
    if (sx.atom || sx.items.empty() || !sx.items[0].atom) return empty;
    return sx.items[0].text;
}

bool parse_int_atom(const std::string& s, std::int64_t& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc{} && res.ptr == e;
}

bool parse_real_atom(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc{} && res.ptr == e;
}

ExprId parse_expr(KernelProgram& p, const Sx& sx);

ExprId parse_atom_expr(KernelProgram& p, const Sx& sx) {
    const std::string& s = sx.text;
    Sreg reg;
    if (is_sreg_token(s, reg)) return p.sreg(reg);
    std::int64_t iv;
    if (parse_int_atom(s, iv)) return p.ci(iv);
    double rv;
    if (parse_real_atom(s, rv)) return p.cr(rv);
    if (p.local_slot(s) >= 0) return p.local(s);
    if (p.param_slot(s) >= 0) {
        if (p.params[p.param_slot(s)].kind == ParamKind::Array)
            err(sx.line, "array '" + s + "' used as a scalar");
        return p.param(s);
    }
    err(sx.line, "unknown name '" + s + "'");
}

ExprId parse_expr(KernelProgram& p, const Sx& sx) {
    if (sx.atom) return parse_atom_expr(p, sx);
    const std::string& h = head(sx);
    if (h.empty()) err(sx.line, "expected an expression");
    const std::size_t argc = sx.items.size() - 1;
    if (h == "draw") {
        if (argc != 0) err(sx.line, "(draw) takes no arguments");
        return p.draw();
    }
    static const std::pair<const char*, UnOp> un_tab[] = {
        {"neg", UnOp::Neg}, {"log", UnOp::Log}, {"floor", UnOp::Floor}};
    for (const auto& [name, op] : un_tab) {
        if (h == name) {
            if (argc != 1) err(sx.line, "(" + h + " ...) takes one argument");
            return p.un(op, parse_expr(p, sx.items[1]));
        }
    }
    static const std::pair<const char*, BinOp> bin_tab[] = {
        {"add", BinOp::Add}, {"sub", BinOp::Sub}, {"mul", BinOp::Mul}, {"div", BinOp::Div},
        {"mod", BinOp::Mod}, {"lt", BinOp::Lt},   {"le", BinOp::Le},   {"gt", BinOp::Gt},
        {"ge", BinOp::Ge},   {"eq", BinOp::Eq},   {"ne", BinOp::Ne},   {"and", BinOp::And},
        {"or", BinOp::Or}};
    for (const auto& [name, op] : bin_tab) {
        if (h == name) {
            if (argc != 2) err(sx.line, "(" + h + " ...) takes two arguments");
            ExprId a = parse_expr(p, sx.items[1]);
            ExprId b = parse_expr(p, sx.items[2]);
            return p.bin(op, a, b);
        }
    }
    err(sx.line, "unknown operator '" + h + "'");
}

std::vector<Statement> parse_stmts(KernelProgram& p, const Sx& parent, std::size_t from);

Statement parse_stmt(KernelProgram& p, const Sx& sx) {
    if (sx.atom) err(sx.line, "expected a statement list, got '" + sx.text + "'");
    const std::string& h = head(sx);
    const std::size_t argc = sx.items.size() - 1;
    try {
        if (h == "assign") {
            if (argc != 2 || !sx.items[1].atom) err(sx.line, "(assign name expr)");
            return p.assign(sx.items[1].text, parse_expr(p, sx.items[2]));
        }
        if (h == "load") {
            if (argc != 3 || !sx.items[1].atom || !sx.items[2].atom)
                err(sx.line, "(load local array index)");
            return p.load(sx.items[1].text, sx.items[2].text, parse_expr(p, sx.items[3]));
        }
        if (h == "store") {
            if (argc != 3 || !sx.items[1].atom) err(sx.line, "(store array index value)");
            ExprId idx = parse_expr(p, sx.items[2]);
            ExprId val = parse_expr(p, sx.items[3]);
            return p.store(sx.items[1].text, idx, val);
        }
        if (h == "halt") {
            if (argc != 0) err(sx.line, "(halt) takes no arguments");
            return KernelProgram::halt();
        }
        if (h == "if") {
            if (argc < 2 || argc > 3) err(sx.line, "(if cond (then ...) [(else ...)])");
            ExprId cond = parse_expr(p, sx.items[1]);
            const Sx& then_sx = sx.items[2];
            if (then_sx.atom || head(then_sx) != "then") err(then_sx.line, "expected (then ...)");
            std::vector<Statement> then_body = parse_stmts(p, then_sx, 1);
            std::vector<Statement> else_body;
            if (argc == 3) {
                const Sx& else_sx = sx.items[3];
                if (else_sx.atom || head(else_sx) != "else")
                    err(else_sx.line, "expected (else ...)");
                else_body = parse_stmts(p, else_sx, 1);
            }
            return KernelProgram::if_(cond, std::move(then_body), std::move(else_body));
        }
        if (h == "while") {
            if (argc < 1) err(sx.line, "(while cond stmts...)");
            ExprId cond = parse_expr(p, sx.items[1]);
            return KernelProgram::while_(cond, parse_stmts(p, sx, 2));
        }
    } catch (const DomainError& e) {
        err(sx.line, e.what());
    }
    err(sx.line, h.empty() ? "expected a statement" : "unknown statement '" + h + "'");
}

std::vector<Statement> parse_stmts(KernelProgram& p, const Sx& parent, std::size_t from) {
    std::vector<Statement> out;
    for (std::size_t i = from; i < parent.items.size(); ++i)
        out.push_back(parse_stmt(p, parent.items[i]));
    return out;
}

}  // namespace

std::string dump_kernel(const KernelProgram& prog) {
    prog.finalize();
    for (const auto& d : prog.params)
        if (!valid_ident(d.name)) throw DomainError("unprintable param name: " + d.name);
    for (const auto& d : prog.locals)
        if (!valid_ident(d.name)) throw DomainError("unprintable local name: " + d.name);

    std::string out = "(kernel";
    for (const auto& d : prog.params) {
        out += "\n  (param " + d.name + " ";
        out += d.kind == ParamKind::Int ? "int" : d.kind == ParamKind::Real ? "real" : "array";
        out += ")";
    }
    for (const auto& d : prog.locals) {
        out += "\n  (local " + d.name + " ";
        out += d.type == ValueType::Int ? "int" : "real";
        out += ")";
    }
    out += "\n  (body";
    write_stmts(out, prog, prog.body, 4);
    out += "))\n";
    return out;
}

KernelProgram parse_kernel(const std::string& text) {
    std::vector<Sx> top = tokenize_list(text);
    if (top.size() != 1 || top[0].atom || head(top[0]) != "kernel")
        throw ParseError("line 1: expected a single (kernel ...) form");
    const Sx& k = top[0];

    KernelProgram p;
    std::size_t i = 1;
    for (; i < k.items.size(); ++i) {
        const Sx& d = k.items[i];
        const std::string& h = head(d);
        if (h == "body") break;
        if (h != "param" && h != "local")
            err(d.line, "expected (param ...), (local ...) or (body ...)");
        if (d.items.size() != 3 || !d.items[1].atom || !d.items[2].atom)
            err(d.line, "(" + h + " name kind)");
        const std::string& name = d.items[1].text;
        const std::string& kind = d.items[2].text;
        if (!valid_ident(name)) err(d.items[1].line, "bad name '" + name + "'");
        try {
            if (h == "param") {
                ParamKind pk;
                if (kind == "int") {
                    pk = ParamKind::Int;
                } else if (kind == "real") {
                    pk = ParamKind::Real;
                } else if (kind == "array") {
                    pk = ParamKind::Array;
                } else {
                    err(d.items[2].line, "param kind must be int, real or array");
                }
                p.add_param(name, pk);
            } else {
                ValueType vt;
                if (kind == "int") {
                    vt = ValueType::Int;
                } else if (kind == "real") {
                    vt = ValueType::Real;
                } else {
                    err(d.items[2].line, "local kind must be int or real");
                }
                p.add_local(name, vt);
            }
        } catch (const DomainError& e) {
            err(d.line, e.what());
        }
    }
    if (i >= k.items.size() || head(k.items[i]) != "body")
        throw ParseError("line " + std::to_string(k.line) + ": missing (body ...)");
    p.body = parse_stmts(p, k.items[i], 1);
    if (i + 1 != k.items.size()) err(k.items[i + 1].line, "unexpected form after (body ...)");
    p.finalize();
    return p;
}

}  // namespace warpsim
