#pragma once

#include <string>

#include "impactlab/ast.hpp"

namespace impactlab {

/// Canonical source rendering. parse(pretty_print(p)) is structurally equal
/// to p; parentheses are emitted only where precedence demands them.
class PrettyPrinter {
public:
    std::string print(const Program& p) {
        out_.clear();
        for (std::size_t i = 0; i < p.decls.size(); ++i) {
            if (i) out_ += "\n";
            decl(*p.decls[i]);
        }
        return out_;
    }

    std::string print_expr(const Expr& e) {
        out_.clear();
        expr(e, 0);
        return out_;
    }

private:
    void line(const std::string& s) {
        out_.append(static_cast<std::size_t>(indent_) * 4, ' ');
        out_ += s;
        out_ += "\n";
    }

    void decl(const Decl& d) {
        if (d.kind == NodeKind::ClassDecl) {
            const auto& c = static_cast<const ClassDecl&>(d);
            std::string head = "class " + c.name;
            if (!c.extends.empty()) head += " extends " + c.extends;
            if (!c.implements.empty()) {
                head += " implements ";
                for (std::size_t i = 0; i < c.implements.size(); ++i) {
                    if (i) head += ", ";
                    head += c.implements[i];
                }
            }
            line(head + " {");
            ++indent_;
            for (const auto& m : c.members) member(*m);
            --indent_;
            line("}");
        } else {
            const auto& it = static_cast<const InterfaceDecl&>(d);
            line("interface " + it.name + " {");
            ++indent_;
            for (const auto& s : it.sigs)
                line(s->return_type.text + " " + s->name + params(s->params) + ";");
            --indent_;
            line("}");
        }
    }

    static std::string params(const std::vector<Param>& ps) {
        std::string s = "(";
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (i) s += ", ";
            s += ps[i].type.text + " " + ps[i].name;
        }
        s += ")";
        return s;
    }

    void member(const MemberDecl& m) {
        if (m.kind == NodeKind::MethodDecl) {
            const auto& md = static_cast<const MethodDecl&>(m);
            std::string head;
            if (md.is_static) head += "static ";
            if (md.is_test) head += "test ";
            head += md.return_type.text + " " + md.name + params(md.params) + " {";
            line(head);
            ++indent_;
            for (const auto& s : md.body->stmts) stmt(*s);
            --indent_;
            line("}");
        } else {
            const auto& fd = static_cast<const FieldDecl&>(m);
            std::string s;
            if (fd.is_static) s += "static ";
            s += fd.type.text + " " + fd.name;
            if (fd.init) s += " = " + sub(*fd.init, 0);
            line(s + ";");
        }
    }

    void stmt(const Stmt& s) {
        switch (s.kind) {
            case NodeKind::Block: {
                line("{");
                ++indent_;
                for (const auto& st : static_cast<const Block&>(s).stmts) stmt(*st);
                --indent_;
                line("}");
                break;
            }
            case NodeKind::LocalDecl: {
                const auto& l = static_cast<const LocalDecl&>(s);
                std::string t = l.type.text + " " + l.name;
                if (l.init) t += " = " + sub(*l.init, 0);
                line(t + ";");
                break;
            }
            case NodeKind::AssignLocal: {
                const auto& a = static_cast<const AssignLocal&>(s);
                line(a.name + " = " + sub(*a.value, 0) + ";");
                break;
            }
            case NodeKind::AssignField: {
                const auto& a = static_cast<const AssignField&>(s);
                line(sub(*a.obj, kPostfixPrec) + "." + a.field + " = " + sub(*a.value, 0) + ";");
                break;
            }
            case NodeKind::IfStmt: {
                const auto& f = static_cast<const IfStmt&>(s);
                line("if (" + sub(*f.cond, 0) + ") {");
                ++indent_;
                for (const auto& st : f.then_block->stmts) stmt(*st);
                --indent_;
                if (f.else_block) {
                    line("} else {");
                    ++indent_;
                    for (const auto& st : f.else_block->stmts) stmt(*st);
                    --indent_;
                }
                line("}");
                break;
            }
            case NodeKind::WhileStmt: {
                const auto& w = static_cast<const WhileStmt&>(s);
                line("while (" + sub(*w.cond, 0) + ") {");
                ++indent_;
                for (const auto& st : w.body->stmts) stmt(*st);
                --indent_;
                line("}");
                break;
            }
            case NodeKind::ReturnStmt: {
                const auto& r = static_cast<const ReturnStmt&>(s);
                line(r.value ? "return " + sub(*r.value, 0) + ";" : "return;");
                break;
            }
            case NodeKind::ExprStmt:
                line(sub(*static_cast<const ExprStmt&>(s).expr, 0) + ";");
                break;
            case NodeKind::AssertStmt:
                line("assert(" + sub(*static_cast<const AssertStmt&>(s).expr, 0) + ");");
                break;
            default: break;
        }
    }

    static constexpr int kUnaryPrec = 7;
    static constexpr int kPostfixPrec = 8;
    static constexpr int kAtomPrec = 9;

    static int precedence_of(BinaryOp op) {
        switch (op) {
            case BinaryOp::Or: return 1;
            case BinaryOp::And: return 2;
            case BinaryOp::Eq:
            case BinaryOp::Ne: return 3;
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge: return 4;
            case BinaryOp::Add:
            case BinaryOp::Sub: return 5;
            case BinaryOp::Mul:
            case BinaryOp::Div:
            case BinaryOp::Mod: return 6;
        }
        return 0;
    }

    static int precedence_of(const Expr& e) {
        switch (e.kind) {
            case NodeKind::BinaryExpr:
                return precedence_of(static_cast<const BinaryExpr&>(e).op);
            case NodeKind::UnaryExpr: return kUnaryPrec;
            case NodeKind::FieldRead: return kPostfixPrec;
            case NodeKind::CallExpr:
                return static_cast<const CallExpr&>(e).recv ? kPostfixPrec : kAtomPrec;
            default: return kAtomPrec;
        }
    }

    /// Renders e, parenthesizing when its precedence is below the context.
    std::string sub(const Expr& e, int min_prec) {
        std::string s;
        expr_to(e, s);
        if (precedence_of(e) < min_prec) return "(" + s + ")";
        return s;
    }

    void expr(const Expr& e, int min_prec) { out_ += sub(e, min_prec); }

    void expr_to(const Expr& e, std::string& s) {
        switch (e.kind) {
            case NodeKind::IntLit:
                s += std::to_string(static_cast<const IntLit&>(e).value);
                break;
            case NodeKind::BoolLit:
                s += static_cast<const BoolLit&>(e).value ? "true" : "false";
                break;
            case NodeKind::ThisExpr:
                s += "this";
                break;
            case NodeKind::NameRead:
                s += static_cast<const NameRead&>(e).name;
                break;
            case NodeKind::FieldRead: {
                const auto& f = static_cast<const FieldRead&>(e);
                s += sub(*f.obj, kPostfixPrec) + "." + f.field;
                break;
            }
            case NodeKind::CallExpr: {
                const auto& c = static_cast<const CallExpr&>(e);
                if (c.recv) s += sub(*c.recv, kPostfixPrec) + ".";
                s += c.name + "(";
                for (std::size_t i = 0; i < c.args.size(); ++i) {
                    if (i) s += ", ";
                    s += sub(*c.args[i], 0);
                }
                s += ")";
                break;
            }
            case NodeKind::ReflectCall: {
                const auto& r = static_cast<const ReflectCall&>(e);
                s += "reflect_call(" + sub(*r.recv, 0) + ", \"" + r.method_name + "\")";
                break;
            }
            case NodeKind::AbsCall:
                s += "abs(" + sub(*static_cast<const AbsCall&>(e).arg, 0) + ")";
                break;
            case NodeKind::NewExpr:
                s += "new " + static_cast<const NewExpr&>(e).class_name + "()";
                break;
            case NodeKind::BinaryExpr: {
                const auto& b = static_cast<const BinaryExpr&>(e);
                int p = precedence_of(b.op);
                s += sub(*b.lhs, p) + " " + binary_op_symbol(b.op) + " " + sub(*b.rhs, p + 1);
                break;
            }
            case NodeKind::UnaryExpr: {
                const auto& u = static_cast<const UnaryExpr&>(e);
                s += (u.op == UnaryOp::Not ? "!" : "-") + sub(*u.operand, kUnaryPrec);
                break;
            }
            default: break;
        }
    }

    std::string out_;
    int indent_ = 0;
};

inline std::string pretty_print(const Program& p) { return PrettyPrinter{}.print(p); }
inline std::string pretty_print_expr(const Expr& e) { return PrettyPrinter{}.print_expr(e); }

}  // namespace impactlab
