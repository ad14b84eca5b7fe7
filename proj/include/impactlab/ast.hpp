#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "impactlab/diagnostics.hpp"

namespace impactlab {

// A NodePath addresses an AST node as the sequence of child indices walked
// from the Program root. Paths survive pretty-printing and identify mutation
// sites in manifests.
using NodePath = std::vector<std::uint32_t>;

inline std::string render_path(const NodePath& p) {
    std::string s = "[";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ".";
        s += std::to_string(p[i]);
    }
    s += "]";
    return s;
}

enum class NodeKind {
    Program,
    ClassDecl,
    InterfaceDecl,
    MethodDecl,
    MethodSigDecl,
    FieldDecl,
    Block,
    LocalDecl,
    AssignLocal,
    AssignField,
    IfStmt,
    WhileStmt,
    ReturnStmt,
    ExprStmt,
    AssertStmt,
    IntLit,
    BoolLit,
    ThisExpr,
    NameRead,
    FieldRead,
    CallExpr,
    ReflectCall,
    AbsCall,
    NewExpr,
    BinaryExpr,
    UnaryExpr,
};

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnaryOp { Not, Neg };

inline const char* binary_op_symbol(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Mod: return "%";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::And: return "&&";
        case BinaryOp::Or: return "||";
    }
    return "?";
}

inline bool is_arith_op(BinaryOp op) {
    return op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul ||
           op == BinaryOp::Div || op == BinaryOp::Mod;
}
inline bool is_relational_op(BinaryOp op) {
    return op == BinaryOp::Lt || op == BinaryOp::Le || op == BinaryOp::Gt ||
           op == BinaryOp::Ge || op == BinaryOp::Eq || op == BinaryOp::Ne;
}
inline bool is_logical_op(BinaryOp op) {
    return op == BinaryOp::And || op == BinaryOp::Or;
}

/// A type as written in source; resolution happens in the checker.
struct TypeName {
    std::string text;
    Span span;
};

struct Param {
    TypeName type;
    std::string name;
};

class Expr;

/// Base of every AST node. Children are exposed through a uniform indexed
/// interface so NodePaths have a single authoritative meaning; the index
/// layout per kind is fixed by each subclass below.
class Node {
public:
    explicit Node(NodeKind k, Span s = {}) : kind(k), span(s) {}
    virtual ~Node() = default;

    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

protected:
    Node(Node&&) = default;
    Node& operator=(Node&&) = default;

public:
    NodeKind kind;
    Span span;

    virtual std::size_t child_count() const = 0;
    virtual const Node* child(std::size_t i) const = 0;
    virtual Node* child(std::size_t i) = 0;

    /// Owning slot of child i when that child is an expression that a
    /// mutation may replace; nullptr for non-expression slots.
    virtual std::unique_ptr<Expr>* expr_slot(std::size_t) { return nullptr; }

    /// Attribute (non-child) equality with a node of the same kind.
    virtual bool same_head(const Node& other) const = 0;
};

class Expr : public Node {
public:
    using Node::Node;
    virtual std::unique_ptr<Expr> clone_expr() const = 0;
};

class Stmt : public Node {
public:
    using Node::Node;
    virtual std::unique_ptr<Stmt> clone_stmt() const = 0;
};

namespace detail {
template <typename T>
std::vector<std::unique_ptr<T>> clone_all(const std::vector<std::unique_ptr<T>>& xs);
inline std::unique_ptr<Expr> clone_opt(const std::unique_ptr<Expr>& e) {
    return e ? e->clone_expr() : nullptr;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

class IntLit : public Expr {
public:
    IntLit(std::int64_t v, Span s = {}) : Expr(NodeKind::IntLit, s), value(v) {}
    std::int64_t value;

    std::size_t child_count() const override { return 0; }
    const Node* child(std::size_t) const override { return nullptr; }
    Node* child(std::size_t) override { return nullptr; }
    bool same_head(const Node& o) const override {
        return value == static_cast<const IntLit&>(o).value;
    }
    std::unique_ptr<Expr> clone_expr() const override {
        return std::make_unique<IntLit>(value, span);
    }
};

class BoolLit : public Expr {
public:
    BoolLit(bool v, Span s = {}) : Expr(NodeKind::BoolLit, s), value(v) {}
    bool value;

    std::size_t child_count() const override { return 0; }
    const Node* child(std::size_t) const override { return nullptr; }
    Node* child(std::size_t) override { return nullptr; }
    bool same_head(const Node& o) const override {
        return value == static_cast<const BoolLit&>(o).value;
    }
    std::unique_ptr<Expr> clone_expr() const override {
        return std::make_unique<BoolLit>(value, span);
    }
};

class ThisExpr : public Expr {
public:
    explicit ThisExpr(Span s = {}) : Expr(NodeKind::ThisExpr, s) {}
    std::size_t child_count() const override { return 0; }
    const Node* child(std::size_t) const override { return nullptr; }
    Node* child(std::size_t) override { return nullptr; }
    bool same_head(const Node&) const override { return true; }
    std::unique_ptr<Expr> clone_expr() const override {
        return std::make_unique<ThisExpr>(span);
    }
};

/// Unqualified identifier; resolves to a local or parameter, or, when used
/// as the receiver of a member access, to a type name.
class NameRead : public Expr {
public:
    NameRead(std::string n, Span s = {}) : Expr(NodeKind::NameRead, s), name(std::move(n)) {}
    std::string name;

    std::size_t child_count() const override { return 0; }
    const Node* child(std::size_t) const override { return nullptr; }
    Node* child(std::size_t) override { return nullptr; }
    bool same_head(const Node& o) const override {
        return name == static_cast<const NameRead&>(o).name;
    }
    std::unique_ptr<Expr> clone_expr() const override {
        return std::make_unique<NameRead>(name, span);
    }
};

class FieldRead : public Expr {
public:
    FieldRead(std::unique_ptr<Expr> o, std::string f, Span s = {})
        : Expr(NodeKind::FieldRead, s), obj(std::move(o)), field(std::move(f)) {}
    std::unique_ptr<Expr> obj;
    std::string field;

    std::size_t child_count() const override { return 1; }
    const Node* child(std::size_t i) const override { return i == 0 ? obj.get() : nullptr; }
    Node* child(std::size_t i) override { return i == 0 ? obj.get() : nullptr; }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override { return i == 0 ? &obj : nullptr; }
    bool same_head(const Node& o) const override {
        return field == static_cast<const FieldRead&>(o).field;
    }
    std::unique_ptr<Expr> clone_expr() const override {
        return std::make_unique<FieldRead>(obj->clone_expr(), field, span);
    }
};

/// Method call `recv.name(args)`; a null receiver means an implicit-this
/// call `name(args)`. Child order: receiver (when present) then arguments.
class CallExpr : public Expr {
public:
    CallExpr(std::unique_ptr<Expr> r, std::string n, std::vector<std::unique_ptr<Expr>> a,
             Span s = {})
        : Expr(NodeKind::CallExpr, s), recv(std::move(r)), name(std::move(n)), args(std::move(a)) {}
    std::unique_ptr<Expr> recv;
    std::string name;
    std::vector<std::unique_ptr<Expr>> args;

    std::size_t child_count() const override { return (recv ? 1 : 0) + args.size(); }
    const Node* child(std::size_t i) const override {
        if (recv) {
            if (i == 0) return recv.get();
            --i;
        }
        return i < args.size() ? args[i].get() : nullptr;
    }
    Node* child(std::size_t i) override {
        return const_cast<Node*>(static_cast<const CallExpr*>(this)->child(i));
    }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override {
        if (recv) {
            if (i == 0) return &recv;
            --i;
        }
        return i < args.size() ? &args[i] : nullptr;
    }
    bool same_head(const Node& o) const override {
        const auto& c = static_cast<const CallExpr&>(o);
        return name == c.name && (recv != nullptr) == (c.recv != nullptr) &&
               args.size() == c.args.size();
    }
    std::unique_ptr<Expr> clone_expr() const override {
        std::vector<std::unique_ptr<Expr>> as;
        as.reserve(args.size());
        for (const auto& a : args) as.push_back(a->clone_expr());
        return std::make_unique<CallExpr>(detail::clone_opt(recv), name, std::move(as), span);
    }
};

/// Built-in `reflect_call(recv, "name")`: dynamic no-argument dispatch by
/// method name, invisible to static call resolution.
class ReflectCall : public Expr {
public:
    ReflectCall(std::unique_ptr<Expr> r, std::string n, Span s = {})
        : Expr(NodeKind::ReflectCall, s), recv(std::move(r)), method_name(std::move(n)) {}
    std::unique_ptr<Expr> recv;
    std::string method_name;

    std::size_t child_count() const override { return 1; }
    const Node* child(std::size_t i) const override { return i == 0 ? recv.get() : nullptr; }
    Node* child(std::size_t i) override { return i == 0 ? recv.get() : nullptr; }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override { return i == 0 ? &recv : nullptr; }
    bool same_head(const Node& o) const override {
        return method_name == static_cast<const ReflectCall&>(o).method_name;
    }
    std::unique_ptr<Expr> clone_expr() const override {
        return std::make_unique<ReflectCall>(recv->clone_expr(), method_name, span);
    }
};

/// Built-in `abs(expr)`.
class AbsCall : public Expr {
public:
    AbsCall(std::unique_ptr<Expr> a, Span s = {}) : Expr(NodeKind::AbsCall, s), arg(std::move(a)) {}
    std::unique_ptr<Expr> arg;

    std::size_t child_count() const override { return 1; }
    const Node* child(std::size_t i) const override { return i == 0 ? arg.get() : nullptr; }
    Node* child(std::size_t i) override { return i == 0 ? arg.get() : nullptr; }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override { return i == 0 ? &arg : nullptr; }
    bool same_head(const Node&) const override { return true; }
    std::unique_ptr<Expr> clone_expr() const override {
        return std::make_unique<AbsCall>(arg->clone_expr(), span);
    }
};

class NewExpr : public Expr {
public:
    NewExpr(std::string c, Span s = {}) : Expr(NodeKind::NewExpr, s), class_name(std::move(c)) {}
    std::string class_name;

    std::size_t child_count() const override { return 0; }
    const Node* child(std::size_t) const override { return nullptr; }
    Node* child(std::size_t) override { return nullptr; }
    bool same_head(const Node& o) const override {
        return class_name == static_cast<const NewExpr&>(o).class_name;
    }
    std::unique_ptr<Expr> clone_expr() const override {
        return std::make_unique<NewExpr>(class_name, span);
    }
};

class BinaryExpr : public Expr {
public:
    BinaryExpr(BinaryOp o, std::unique_ptr<Expr> l, std::unique_ptr<Expr> r, Span s = {})
        : Expr(NodeKind::BinaryExpr, s), op(o), lhs(std::move(l)), rhs(std::move(r)) {}
    BinaryOp op;
    std::unique_ptr<Expr> lhs;
    std::unique_ptr<Expr> rhs;

    std::size_t child_count() const override { return 2; }
    const Node* child(std::size_t i) const override {
        return i == 0 ? lhs.get() : i == 1 ? rhs.get() : nullptr;
    }
    Node* child(std::size_t i) override {
        return i == 0 ? lhs.get() : i == 1 ? rhs.get() : nullptr;
    }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override {
        return i == 0 ? &lhs : i == 1 ? &rhs : nullptr;
    }
    bool same_head(const Node& o) const override {
        return op == static_cast<const BinaryExpr&>(o).op;
    }
    std::unique_ptr<Expr> clone_expr() const override {
        return std::make_unique<BinaryExpr>(op, lhs->clone_expr(), rhs->clone_expr(), span);
    }
};

class UnaryExpr : public Expr {
public:
    UnaryExpr(UnaryOp o, std::unique_ptr<Expr> e, Span s = {})
        : Expr(NodeKind::UnaryExpr, s), op(o), operand(std::move(e)) {}
    UnaryOp op;
    std::unique_ptr<Expr> operand;

    std::size_t child_count() const override { return 1; }
    const Node* child(std::size_t i) const override { return i == 0 ? operand.get() : nullptr; }
    Node* child(std::size_t i) override { return i == 0 ? operand.get() : nullptr; }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override { return i == 0 ? &operand : nullptr; }
    bool same_head(const Node& o) const override {
        return op == static_cast<const UnaryExpr&>(o).op;
    }
    std::unique_ptr<Expr> clone_expr() const override {
        return std::make_unique<UnaryExpr>(op, operand->clone_expr(), span);
    }
};

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

class Block : public Stmt {
public:
    explicit Block(std::vector<std::unique_ptr<Stmt>> ss = {}, Span s = {})
        : Stmt(NodeKind::Block, s), stmts(std::move(ss)) {}
    std::vector<std::unique_ptr<Stmt>> stmts;

    std::size_t child_count() const override { return stmts.size(); }
    const Node* child(std::size_t i) const override {
        return i < stmts.size() ? stmts[i].get() : nullptr;
    }
    Node* child(std::size_t i) override { return i < stmts.size() ? stmts[i].get() : nullptr; }
    bool same_head(const Node&) const override { return true; }
    std::unique_ptr<Stmt> clone_stmt() const override {
        return std::make_unique<Block>(detail::clone_all(stmts), span);
    }
    std::unique_ptr<Block> clone_block() const {
        return std::make_unique<Block>(detail::clone_all(stmts), span);
    }
};

class LocalDecl : public Stmt {
public:
    LocalDecl(TypeName t, std::string n, std::unique_ptr<Expr> i, Span s = {})
        : Stmt(NodeKind::LocalDecl, s), type(std::move(t)), name(std::move(n)),
          init(std::move(i)) {}
    TypeName type;
    std::string name;
    std::unique_ptr<Expr> init;  // may be null

    std::size_t child_count() const override { return init ? 1 : 0; }
    const Node* child(std::size_t i) const override {
        return (init && i == 0) ? init.get() : nullptr;
    }
    Node* child(std::size_t i) override { return (init && i == 0) ? init.get() : nullptr; }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override {
        return (init && i == 0) ? &init : nullptr;
    }
    bool same_head(const Node& o) const override {
        const auto& l = static_cast<const LocalDecl&>(o);
        return type.text == l.type.text && name == l.name && (init != nullptr) == (l.init != nullptr);
    }
    std::unique_ptr<Stmt> clone_stmt() const override {
        return std::make_unique<LocalDecl>(type, name, detail::clone_opt(init), span);
    }
};

class AssignLocal : public Stmt {
public:
    AssignLocal(std::string n, std::unique_ptr<Expr> v, Span s = {})
        : Stmt(NodeKind::AssignLocal, s), name(std::move(n)), value(std::move(v)) {}
    std::string name;
    std::unique_ptr<Expr> value;

    std::size_t child_count() const override { return 1; }
    const Node* child(std::size_t i) const override { return i == 0 ? value.get() : nullptr; }
    Node* child(std::size_t i) override { return i == 0 ? value.get() : nullptr; }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override { return i == 0 ? &value : nullptr; }
    bool same_head(const Node& o) const override {
        return name == static_cast<const AssignLocal&>(o).name;
    }
    std::unique_ptr<Stmt> clone_stmt() const override {
        return std::make_unique<AssignLocal>(name, value->clone_expr(), span);
    }
};

/// `obj.field = value;` — the single field-write form.
class AssignField : public Stmt {
public:
    AssignField(std::unique_ptr<Expr> o, std::string f, std::unique_ptr<Expr> v, Span s = {})
        : Stmt(NodeKind::AssignField, s), obj(std::move(o)), field(std::move(f)),
          value(std::move(v)) {}
    std::unique_ptr<Expr> obj;
    std::string field;
    std::unique_ptr<Expr> value;

    std::size_t child_count() const override { return 2; }
    const Node* child(std::size_t i) const override {
        return i == 0 ? obj.get() : i == 1 ? value.get() : nullptr;
    }
    Node* child(std::size_t i) override {
        return i == 0 ? obj.get() : i == 1 ? value.get() : nullptr;
    }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override {
        return i == 0 ? &obj : i == 1 ? &value : nullptr;
    }
    bool same_head(const Node& o) const override {
        return field == static_cast<const AssignField&>(o).field;
    }
    std::unique_ptr<Stmt> clone_stmt() const override {
        return std::make_unique<AssignField>(obj->clone_expr(), field, value->clone_expr(), span);
    }
};

class IfStmt : public Stmt {
public:
    IfStmt(std::unique_ptr<Expr> c, std::unique_ptr<Block> t, std::unique_ptr<Block> e, Span s = {})
        : Stmt(NodeKind::IfStmt, s), cond(std::move(c)), then_block(std::move(t)),
          else_block(std::move(e)) {}
    std::unique_ptr<Expr> cond;
    std::unique_ptr<Block> then_block;
    std::unique_ptr<Block> else_block;  // may be null

    std::size_t child_count() const override { return else_block ? 3 : 2; }
    const Node* child(std::size_t i) const override {
        if (i == 0) return cond.get();
        if (i == 1) return then_block.get();
        if (i == 2 && else_block) return else_block.get();
        return nullptr;
    }
    Node* child(std::size_t i) override {
        return const_cast<Node*>(static_cast<const IfStmt*>(this)->child(i));
    }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override { return i == 0 ? &cond : nullptr; }
    bool same_head(const Node& o) const override {
        return (else_block != nullptr) == (static_cast<const IfStmt&>(o).else_block != nullptr);
    }
    std::unique_ptr<Stmt> clone_stmt() const override {
        return std::make_unique<IfStmt>(cond->clone_expr(), then_block->clone_block(),
                                        else_block ? else_block->clone_block() : nullptr, span);
    }
};

class WhileStmt : public Stmt {
public:
    WhileStmt(std::unique_ptr<Expr> c, std::unique_ptr<Block> b, Span s = {})
        : Stmt(NodeKind::WhileStmt, s), cond(std::move(c)), body(std::move(b)) {}
    std::unique_ptr<Expr> cond;
    std::unique_ptr<Block> body;

    std::size_t child_count() const override { return 2; }
    const Node* child(std::size_t i) const override {
        return i == 0 ? static_cast<const Node*>(cond.get())
                      : i == 1 ? static_cast<const Node*>(body.get()) : nullptr;
    }
    Node* child(std::size_t i) override {
        return const_cast<Node*>(static_cast<const WhileStmt*>(this)->child(i));
    }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override { return i == 0 ? &cond : nullptr; }
    bool same_head(const Node&) const override { return true; }
    std::unique_ptr<Stmt> clone_stmt() const override {
        return std::make_unique<WhileStmt>(cond->clone_expr(), body->clone_block(), span);
    }
};

class ReturnStmt : public Stmt {
public:
    ReturnStmt(std::unique_ptr<Expr> v, Span s = {})
        : Stmt(NodeKind::ReturnStmt, s), value(std::move(v)) {}
    std::unique_ptr<Expr> value;  // null for bare `return;`

    std::size_t child_count() const override { return value ? 1 : 0; }
    const Node* child(std::size_t i) const override {
        return (value && i == 0) ? value.get() : nullptr;
    }
    Node* child(std::size_t i) override { return (value && i == 0) ? value.get() : nullptr; }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override {
        return (value && i == 0) ? &value : nullptr;
    }
    bool same_head(const Node& o) const override {
        return (value != nullptr) == (static_cast<const ReturnStmt&>(o).value != nullptr);
    }
    std::unique_ptr<Stmt> clone_stmt() const override {
        return std::make_unique<ReturnStmt>(detail::clone_opt(value), span);
    }
};

class ExprStmt : public Stmt {
public:
    ExprStmt(std::unique_ptr<Expr> e, Span s = {}) : Stmt(NodeKind::ExprStmt, s), expr(std::move(e)) {}
    std::unique_ptr<Expr> expr;

    std::size_t child_count() const override { return 1; }
    const Node* child(std::size_t i) const override { return i == 0 ? expr.get() : nullptr; }
    Node* child(std::size_t i) override { return i == 0 ? expr.get() : nullptr; }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override { return i == 0 ? &expr : nullptr; }
    bool same_head(const Node&) const override { return true; }
    std::unique_ptr<Stmt> clone_stmt() const override {
        return std::make_unique<ExprStmt>(expr->clone_expr(), span);
    }
};

class AssertStmt : public Stmt {
public:
    AssertStmt(std::unique_ptr<Expr> e, Span s = {})
        : Stmt(NodeKind::AssertStmt, s), expr(std::move(e)) {}
    std::unique_ptr<Expr> expr;

    std::size_t child_count() const override { return 1; }
    const Node* child(std::size_t i) const override { return i == 0 ? expr.get() : nullptr; }
    Node* child(std::size_t i) override { return i == 0 ? expr.get() : nullptr; }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override { return i == 0 ? &expr : nullptr; }
    bool same_head(const Node&) const override { return true; }
    std::unique_ptr<Stmt> clone_stmt() const override {
        return std::make_unique<AssertStmt>(expr->clone_expr(), span);
    }
};

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

class MemberDecl : public Node {
public:
    using Node::Node;
    virtual std::unique_ptr<MemberDecl> clone_member() const = 0;
};

class MethodDecl : public MemberDecl {
public:
    MethodDecl(bool stat, bool test, TypeName ret, std::string n, std::vector<Param> ps,
               std::unique_ptr<Block> b, Span s = {})
        : MemberDecl(NodeKind::MethodDecl, s), is_static(stat), is_test(test),
          return_type(std::move(ret)), name(std::move(n)), params(std::move(ps)),
          body(std::move(b)) {}
    bool is_static;
    bool is_test;
    TypeName return_type;
    std::string name;
    std::vector<Param> params;
    std::unique_ptr<Block> body;

    std::size_t child_count() const override { return 1; }
    const Node* child(std::size_t i) const override { return i == 0 ? body.get() : nullptr; }
    Node* child(std::size_t i) override { return i == 0 ? body.get() : nullptr; }
    bool same_head(const Node& o) const override {
        const auto& m = static_cast<const MethodDecl&>(o);
        if (is_static != m.is_static || is_test != m.is_test || name != m.name ||
            return_type.text != m.return_type.text || params.size() != m.params.size())
            return false;
        for (std::size_t i = 0; i < params.size(); ++i)
            if (params[i].type.text != m.params[i].type.text || params[i].name != m.params[i].name)
                return false;
        return true;
    }
    std::unique_ptr<MemberDecl> clone_member() const override {
        return std::make_unique<MethodDecl>(is_static, is_test, return_type, name, params,
                                            body->clone_block(), span);
    }
};

class FieldDecl : public MemberDecl {
public:
    FieldDecl(bool stat, TypeName t, std::string n, std::unique_ptr<Expr> i, Span s = {})
        : MemberDecl(NodeKind::FieldDecl, s), is_static(stat), type(std::move(t)),
          name(std::move(n)), init(std::move(i)) {}
    bool is_static;
    TypeName type;
    std::string name;
    std::unique_ptr<Expr> init;  // may be null

    std::size_t child_count() const override { return init ? 1 : 0; }
    const Node* child(std::size_t i) const override {
        return (init && i == 0) ? init.get() : nullptr;
    }
    Node* child(std::size_t i) override { return (init && i == 0) ? init.get() : nullptr; }
    std::unique_ptr<Expr>* expr_slot(std::size_t i) override {
        return (init && i == 0) ? &init : nullptr;
    }
    bool same_head(const Node& o) const override {
        const auto& f = static_cast<const FieldDecl&>(o);
        return is_static == f.is_static && type.text == f.type.text && name == f.name &&
               (init != nullptr) == (f.init != nullptr);
    }
    std::unique_ptr<MemberDecl> clone_member() const override {
        return std::make_unique<FieldDecl>(is_static, type, name, detail::clone_opt(init), span);
    }
};

/// Interface method signature: no body, no static/test flags.
class MethodSigDecl : public Node {
public:
    MethodSigDecl(TypeName ret, std::string n, std::vector<Param> ps, Span s = {})
        : Node(NodeKind::MethodSigDecl, s), return_type(std::move(ret)), name(std::move(n)),
          params(std::move(ps)) {}
    TypeName return_type;
    std::string name;
    std::vector<Param> params;

    std::size_t child_count() const override { return 0; }
    const Node* child(std::size_t) const override { return nullptr; }
    Node* child(std::size_t) override { return nullptr; }
    bool same_head(const Node& o) const override {
        const auto& m = static_cast<const MethodSigDecl&>(o);
        if (name != m.name || return_type.text != m.return_type.text ||
            params.size() != m.params.size())
            return false;
        for (std::size_t i = 0; i < params.size(); ++i)
            if (params[i].type.text != m.params[i].type.text || params[i].name != m.params[i].name)
                return false;
        return true;
    }
    std::unique_ptr<MethodSigDecl> clone_sig() const {
        return std::make_unique<MethodSigDecl>(return_type, name, params, span);
    }
};

class Decl : public Node {
public:
    using Node::Node;
    virtual std::unique_ptr<Decl> clone_decl() const = 0;
};

class ClassDecl : public Decl {
public:
    ClassDecl(std::string n, std::string ext, std::vector<std::string> impls,
              std::vector<std::unique_ptr<MemberDecl>> ms, Span s = {})
        : Decl(NodeKind::ClassDecl, s), name(std::move(n)), extends(std::move(ext)),
          implements(std::move(impls)), members(std::move(ms)) {}
    std::string name;
    std::string extends;  // empty when absent
    std::vector<std::string> implements;
    std::vector<std::unique_ptr<MemberDecl>> members;

    std::size_t child_count() const override { return members.size(); }
    const Node* child(std::size_t i) const override {
        return i < members.size() ? members[i].get() : nullptr;
    }
    Node* child(std::size_t i) override { return i < members.size() ? members[i].get() : nullptr; }
    bool same_head(const Node& o) const override {
        const auto& c = static_cast<const ClassDecl&>(o);
        return name == c.name && extends == c.extends && implements == c.implements;
    }
    std::unique_ptr<Decl> clone_decl() const override {
        std::vector<std::unique_ptr<MemberDecl>> ms;
        ms.reserve(members.size());
        for (const auto& m : members) ms.push_back(m->clone_member());
        return std::make_unique<ClassDecl>(name, extends, implements, std::move(ms), span);
    }
};

class InterfaceDecl : public Decl {
public:
    InterfaceDecl(std::string n, std::vector<std::unique_ptr<MethodSigDecl>> ss, Span s = {})
        : Decl(NodeKind::InterfaceDecl, s), name(std::move(n)), sigs(std::move(ss)) {}
    std::string name;
    std::vector<std::unique_ptr<MethodSigDecl>> sigs;

    std::size_t child_count() const override { return sigs.size(); }
    const Node* child(std::size_t i) const override {
        return i < sigs.size() ? sigs[i].get() : nullptr;
    }
    Node* child(std::size_t i) override { return i < sigs.size() ? sigs[i].get() : nullptr; }
    bool same_head(const Node& o) const override {
        return name == static_cast<const InterfaceDecl&>(o).name;
    }
    std::unique_ptr<Decl> clone_decl() const override {
        std::vector<std::unique_ptr<MethodSigDecl>> ss;
        ss.reserve(sigs.size());
        for (const auto& g : sigs) ss.push_back(g->clone_sig());
        return std::make_unique<InterfaceDecl>(name, std::move(ss), span);
    }
};

/// Root node: the ordered declarations of a whole project.
class Program : public Node {
public:
    Program() : Node(NodeKind::Program) {}
    explicit Program(std::vector<std::unique_ptr<Decl>> ds)
        : Node(NodeKind::Program), decls(std::move(ds)) {}
    Program(Program&&) = default;
    Program& operator=(Program&&) = default;

    std::vector<std::unique_ptr<Decl>> decls;

    std::size_t child_count() const override { return decls.size(); }
    const Node* child(std::size_t i) const override {
        return i < decls.size() ? decls[i].get() : nullptr;
    }
    Node* child(std::size_t i) override { return i < decls.size() ? decls[i].get() : nullptr; }
    bool same_head(const Node&) const override { return true; }

    Program clone() const {
        std::vector<std::unique_ptr<Decl>> ds;
        ds.reserve(decls.size());
        for (const auto& d : decls) ds.push_back(d->clone_decl());
        return Program(std::move(ds));
    }
};

namespace detail {
template <typename T>
std::vector<std::unique_ptr<T>> clone_all(const std::vector<std::unique_ptr<T>>& xs) {
    std::vector<std::unique_ptr<T>> out;
    out.reserve(xs.size());
    for (const auto& x : xs) {
        if constexpr (std::is_same_v<T, Stmt>)
            out.push_back(x->clone_stmt());
        else
            out.push_back(x->clone_expr());
    }
    return out;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Path navigation and structural equality
// ---------------------------------------------------------------------------

inline const Node* node_at(const Program& program, const NodePath& path) {
    const Node* n = &program;
    for (auto idx : path) {
        n = n->child(idx);
        if (!n) return nullptr;
    }
    return n;
}

inline Node* node_at(Program& program, const NodePath& path) {
    Node* n = &program;
    for (auto idx : path) {
        n = n->child(idx);
        if (!n) return nullptr;
    }
    return n;
}

/// Structural equality ignoring spans.
inline bool structurally_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    if (!a.same_head(b)) return false;
    if (a.child_count() != b.child_count()) return false;
    for (std::size_t i = 0; i < a.child_count(); ++i)
        if (!structurally_equal(*a.child(i), *b.child(i))) return false;
    return true;
}

/// Preorder walk delivering each node with its path.
template <typename F>
void walk_with_paths(const Node& node, NodePath& path, F&& fn) {
    fn(node, const_cast<const NodePath&>(path));
    for (std::size_t i = 0; i < node.child_count(); ++i) {
        path.push_back(static_cast<std::uint32_t>(i));
        walk_with_paths(*node.child(i), path, fn);
        path.pop_back();
    }
}

template <typename F>
void walk_with_paths(const Program& program, F&& fn) {
    NodePath path;
    walk_with_paths(static_cast<const Node&>(program), path, std::forward<F>(fn));
}

inline std::size_t count_nodes(const Node& n) {
    std::size_t c = 1;
    for (std::size_t i = 0; i < n.child_count(); ++i) c += count_nodes(*n.child(i));
    return c;
}

}  // namespace impactlab
