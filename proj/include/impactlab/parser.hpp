#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "impactlab/ast.hpp"
#include "impactlab/lexer.hpp"

namespace impactlab {

struct ParseResult {
    std::unique_ptr<Program> program;  // null on failure
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return program != nullptr; }
};

/// Recursive-descent parser for one token stream. Errors abort the unit;
/// parse() below aggregates units and never returns a partial Program.
class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
        : toks_(std::move(tokens)), diags_(diags) {}

    /// Returns the declarations of the unit, or empty with diagnostics set.
    std::vector<std::unique_ptr<Decl>> run(bool& ok) {
        std::vector<std::unique_ptr<Decl>> decls;
        ok = true;
        try {
            while (!at(TokenKind::EndOfFile)) decls.push_back(declaration());
        } catch (const Abort&) {
            ok = false;
            decls.clear();
        }
        return decls;
    }

private:
    struct Abort {};

    [[noreturn]] void fail(const std::string& msg) {
        diags_.push_back({peek().span, Severity::Error, DiagCode::ParseError, msg});
        throw Abort{};
    }

    const Token& peek(std::size_t k = 0) const {
        std::size_t i = pos_ + k;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at(TokenKind k) const { return peek().kind == k; }
    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(TokenKind k) {
        if (at(k)) {
            advance();
            return true;
        }
        return false;
    }
    const Token& expect(TokenKind k, const char* what) {
        if (!at(k)) fail(std::string("expected ") + what + ", found '" + peek().text + "'");
        return toks_[pos_++];
    }

    bool at_type() const {
        return at(TokenKind::KwInt) || at(TokenKind::KwBool) || at(TokenKind::KwVoid) ||
               at(TokenKind::Ident);
    }

    TypeName type_name() {
        if (!at_type()) fail("expected a type");
        const Token& t = advance();
        return TypeName{t.kind == TokenKind::Ident ? t.text : t.text, t.span};
    }

    std::unique_ptr<Decl> declaration() {
        if (at(TokenKind::KwClass)) return class_decl();
        if (at(TokenKind::KwInterface)) return interface_decl();
        fail("expected 'class' or 'interface'");
    }

    std::unique_ptr<Decl> class_decl() {
        Span sp = peek().span;
        expect(TokenKind::KwClass, "'class'");
        std::string name = expect(TokenKind::Ident, "class name").text;
        std::string ext;
        std::vector<std::string> impls;
        if (accept(TokenKind::KwExtends)) ext = expect(TokenKind::Ident, "superclass name").text;
        if (accept(TokenKind::KwImplements)) {
            impls.push_back(expect(TokenKind::Ident, "interface name").text);
            while (accept(TokenKind::Comma))
                impls.push_back(expect(TokenKind::Ident, "interface name").text);
        }
        expect(TokenKind::LBrace, "'{'");
        std::vector<std::unique_ptr<MemberDecl>> members;
        while (!at(TokenKind::RBrace)) members.push_back(member());
        expect(TokenKind::RBrace, "'}'");
        return std::make_unique<ClassDecl>(name, ext, std::move(impls), std::move(members), sp);
    }

    std::unique_ptr<Decl> interface_decl() {
        Span sp = peek().span;
        expect(TokenKind::KwInterface, "'interface'");
        std::string name = expect(TokenKind::Ident, "interface name").text;
        expect(TokenKind::LBrace, "'{'");
        std::vector<std::unique_ptr<MethodSigDecl>> sigs;
        while (!at(TokenKind::RBrace)) {
            Span ms = peek().span;
            TypeName ret = type_name();
            std::string mname = expect(TokenKind::Ident, "method name").text;
            std::vector<Param> ps = param_list();
            expect(TokenKind::Semi, "';'");
            sigs.push_back(std::make_unique<MethodSigDecl>(std::move(ret), mname, std::move(ps), ms));
        }
        expect(TokenKind::RBrace, "'}'");
        return std::make_unique<InterfaceDecl>(name, std::move(sigs), sp);
    }

    std::unique_ptr<MemberDecl> member() {
        Span sp = peek().span;
        bool is_static = accept(TokenKind::KwStatic);
        bool is_test = accept(TokenKind::KwTest);
        TypeName type = type_name();
        std::string name = expect(TokenKind::Ident, "member name").text;
        if (at(TokenKind::LParen)) {
            std::vector<Param> ps = param_list();
            auto body = block();
            return std::make_unique<MethodDecl>(is_static, is_test, std::move(type), name,
                                                std::move(ps), std::move(body), sp);
        }
        if (is_test) fail("'test' applies only to methods");
        std::unique_ptr<Expr> init;
        if (accept(TokenKind::Assign)) init = expression();
        expect(TokenKind::Semi, "';'");
        return std::make_unique<FieldDecl>(is_static, std::move(type), name, std::move(init), sp);
    }

    std::vector<Param> param_list() {
        expect(TokenKind::LParen, "'('");
        std::vector<Param> ps;
        if (!at(TokenKind::RParen)) {
            do {
                TypeName t = type_name();
                std::string n = expect(TokenKind::Ident, "parameter name").text;
                ps.push_back(Param{std::move(t), std::move(n)});
            } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::RParen, "')'");
        return ps;
    }

    std::unique_ptr<Block> block() {
        Span sp = peek().span;
        expect(TokenKind::LBrace, "'{'");
        std::vector<std::unique_ptr<Stmt>> stmts;
        while (!at(TokenKind::RBrace)) stmts.push_back(statement());
        expect(TokenKind::RBrace, "'}'");
        return std::make_unique<Block>(std::move(stmts), sp);
    }

    std::unique_ptr<Stmt> statement() {
        Span sp = peek().span;
        switch (peek().kind) {
            case TokenKind::KwInt:
            case TokenKind::KwBool:
            case TokenKind::KwVoid:
                return local_decl(sp);
            case TokenKind::Ident:
                // `Ident Ident` introduces a class-typed local.
                if (peek(1).kind == TokenKind::Ident) return local_decl(sp);
                break;
            case TokenKind::KwIf: {
                advance();
                expect(TokenKind::LParen, "'('");
                auto cond = expression();
                expect(TokenKind::RParen, "')'");
                auto then_b = block();
                std::unique_ptr<Block> else_b;
                if (accept(TokenKind::KwElse)) else_b = block();
                return std::make_unique<IfStmt>(std::move(cond), std::move(then_b),
                                                std::move(else_b), sp);
            }
            case TokenKind::KwWhile: {
                advance();
                expect(TokenKind::LParen, "'('");
                auto cond = expression();
                expect(TokenKind::RParen, "')'");
                auto body = block();
                return std::make_unique<WhileStmt>(std::move(cond), std::move(body), sp);
            }
            case TokenKind::KwReturn: {
                advance();
                std::unique_ptr<Expr> value;
                if (!at(TokenKind::Semi)) value = expression();
                expect(TokenKind::Semi, "';'");
                return std::make_unique<ReturnStmt>(std::move(value), sp);
            }
            case TokenKind::KwAssert: {
                advance();
                expect(TokenKind::LParen, "'('");
                auto e = expression();
                expect(TokenKind::RParen, "')'");
                expect(TokenKind::Semi, "';'");
                return std::make_unique<AssertStmt>(std::move(e), sp);
            }
            default: break;
        }
        // Expression statement or assignment.
        auto e = expression();
        if (accept(TokenKind::Assign)) {
            auto value = expression();
            expect(TokenKind::Semi, "';'");
            if (e->kind == NodeKind::NameRead) {
                auto* nr = static_cast<NameRead*>(e.get());
                return std::make_unique<AssignLocal>(nr->name, std::move(value), sp);
            }
            if (e->kind == NodeKind::FieldRead) {
                auto* fr = static_cast<FieldRead*>(e.get());
                return std::make_unique<AssignField>(std::move(fr->obj), fr->field,
                                                     std::move(value), sp);
            }
            diags_.push_back({sp, Severity::Error, DiagCode::ParseError,
                              "invalid assignment target"});
            throw Abort{};
        }
        expect(TokenKind::Semi, "';'");
        return std::make_unique<ExprStmt>(std::move(e), sp);
    }

    std::unique_ptr<Stmt> local_decl(Span sp) {
        TypeName t = type_name();
        std::string name = expect(TokenKind::Ident, "variable name").text;
        std::unique_ptr<Expr> init;
        if (accept(TokenKind::Assign)) init = expression();
        expect(TokenKind::Semi, "';'");
        return std::make_unique<LocalDecl>(std::move(t), name, std::move(init), sp);
    }

    std::unique_ptr<Expr> expression() { return or_expr(); }

    std::unique_ptr<Expr> or_expr() {
        auto e = and_expr();
        while (at(TokenKind::PipePipe)) {
            Span sp = advance().span;
            e = std::make_unique<BinaryExpr>(BinaryOp::Or, std::move(e), and_expr(), sp);
        }
        return e;
    }

    std::unique_ptr<Expr> and_expr() {
        auto e = eq_expr();
        while (at(TokenKind::AmpAmp)) {
            Span sp = advance().span;
            e = std::make_unique<BinaryExpr>(BinaryOp::And, std::move(e), eq_expr(), sp);
        }
        return e;
    }

    std::unique_ptr<Expr> eq_expr() {
        auto e = rel_expr();
        while (at(TokenKind::EqEq) || at(TokenKind::NotEq)) {
            BinaryOp op = at(TokenKind::EqEq) ? BinaryOp::Eq : BinaryOp::Ne;
            Span sp = advance().span;
            e = std::make_unique<BinaryExpr>(op, std::move(e), rel_expr(), sp);
        }
        return e;
    }

    std::unique_ptr<Expr> rel_expr() {
        auto e = add_expr();
        while (at(TokenKind::Lt) || at(TokenKind::Le) || at(TokenKind::Gt) || at(TokenKind::Ge)) {
            BinaryOp op = at(TokenKind::Lt)   ? BinaryOp::Lt
                          : at(TokenKind::Le) ? BinaryOp::Le
                          : at(TokenKind::Gt) ? BinaryOp::Gt
                                              : BinaryOp::Ge;
            Span sp = advance().span;
            e = std::make_unique<BinaryExpr>(op, std::move(e), add_expr(), sp);
        }
        return e;
    }

    std::unique_ptr<Expr> add_expr() {
        auto e = mul_expr();
        while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
            BinaryOp op = at(TokenKind::Plus) ? BinaryOp::Add : BinaryOp::Sub;
            Span sp = advance().span;
            e = std::make_unique<BinaryExpr>(op, std::move(e), mul_expr(), sp);
        }
        return e;
    }

    std::unique_ptr<Expr> mul_expr() {
        auto e = unary_expr();
        while (at(TokenKind::Star) || at(TokenKind::Slash) || at(TokenKind::Percent)) {
            BinaryOp op = at(TokenKind::Star)    ? BinaryOp::Mul
                          : at(TokenKind::Slash) ? BinaryOp::Div
                                                 : BinaryOp::Mod;
            Span sp = advance().span;
            e = std::make_unique<BinaryExpr>(op, std::move(e), unary_expr(), sp);
        }
        return e;
    }

    std::unique_ptr<Expr> unary_expr() {
        if (at(TokenKind::Bang)) {
            Span sp = advance().span;
            return std::make_unique<UnaryExpr>(UnaryOp::Not, unary_expr(), sp);
        }
        if (at(TokenKind::Minus)) {
            Span sp = advance().span;
            return std::make_unique<UnaryExpr>(UnaryOp::Neg, unary_expr(), sp);
        }
        return postfix_expr();
    }

    std::unique_ptr<Expr> postfix_expr() {
        auto e = primary_expr();
        while (at(TokenKind::Dot)) {
            advance();
            const Token& name = expect(TokenKind::Ident, "member name");
            if (at(TokenKind::LParen)) {
                auto args = arg_list();
                e = std::make_unique<CallExpr>(std::move(e), name.text, std::move(args), name.span);
            } else {
                e = std::make_unique<FieldRead>(std::move(e), name.text, name.span);
            }
        }
        return e;
    }

    std::vector<std::unique_ptr<Expr>> arg_list() {
        expect(TokenKind::LParen, "'('");
        std::vector<std::unique_ptr<Expr>> args;
        if (!at(TokenKind::RParen)) {
            do {
                args.push_back(expression());
            } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::RParen, "')'");
        return args;
    }

    std::unique_ptr<Expr> primary_expr() {
        Span sp = peek().span;
        switch (peek().kind) {
            case TokenKind::IntLit: {
                const Token& t = advance();
                return std::make_unique<IntLit>(t.int_value, sp);
            }
            case TokenKind::KwTrue:
                advance();
                return std::make_unique<BoolLit>(true, sp);
            case TokenKind::KwFalse:
                advance();
                return std::make_unique<BoolLit>(false, sp);
            case TokenKind::KwThis:
                advance();
                return std::make_unique<ThisExpr>(sp);
            case TokenKind::KwNew: {
                advance();
                std::string cls = expect(TokenKind::Ident, "class name").text;
                expect(TokenKind::LParen, "'('");
                expect(TokenKind::RParen, "')'");
                return std::make_unique<NewExpr>(cls, sp);
            }
            case TokenKind::KwAbs: {
                advance();
                expect(TokenKind::LParen, "'('");
                auto arg = expression();
                expect(TokenKind::RParen, "')'");
                return std::make_unique<AbsCall>(std::move(arg), sp);
            }
            case TokenKind::KwReflectCall: {
                advance();
                expect(TokenKind::LParen, "'('");
                auto recv = expression();
                expect(TokenKind::Comma, "','");
                const Token& name = expect(TokenKind::StringLit, "method name string");
                expect(TokenKind::RParen, "')'");
                return std::make_unique<ReflectCall>(std::move(recv), name.text, sp);
            }
            case TokenKind::Ident: {
                const Token& t = advance();
                if (at(TokenKind::LParen)) {
                    auto args = arg_list();
                    return std::make_unique<CallExpr>(nullptr, t.text, std::move(args), sp);
                }
                return std::make_unique<NameRead>(t.text, sp);
            }
            case TokenKind::LParen: {
                advance();
                auto e = expression();
                expect(TokenKind::RParen, "')'");
                return e;
            }
            default:
                fail("expected an expression, found '" + peek().text + "'");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic>& diags_;
};

/// Parses a project's units into one Program. Declarations appear in unit
/// order; any lexical or syntactic error yields diagnostics and no Program.
inline ParseResult parse(const std::vector<SourceUnit>& units) {
    ParseResult result;
    if (units.empty()) {
        result.diagnostics.push_back(
            {Span{}, Severity::Error, DiagCode::ParseError, "no source units given"});
        return result;
    }
    std::vector<std::unique_ptr<Decl>> decls;
    bool all_ok = true;
    for (std::size_t u = 0; u < units.size(); ++u) {
        std::vector<Diagnostic> unit_diags;
        Lexer lexer(units[u], static_cast<int>(u), unit_diags);
        std::vector<Token> toks = lexer.run();
        if (has_errors(unit_diags)) {
            all_ok = false;
            for (auto& d : unit_diags) result.diagnostics.push_back(std::move(d));
            continue;
        }
        Parser parser(std::move(toks), unit_diags);
        bool ok = true;
        auto unit_decls = parser.run(ok);
        for (auto& d : unit_diags) result.diagnostics.push_back(std::move(d));
        if (!ok) {
            all_ok = false;
            continue;
        }
        for (auto& d : unit_decls) decls.push_back(std::move(d));
    }
    if (!all_ok) return result;
    result.program = std::make_unique<Program>(std::move(decls));
    return result;
}

}  // namespace impactlab
