#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "impactlab/ast.hpp"
#include "impactlab/diagnostics.hpp"
#include "impactlab/refs.hpp"

namespace impactlab {

enum class TypeKind { Int, Bool, Void, Class, Interface, Invalid };

struct Type {
    TypeKind kind = TypeKind::Invalid;
    std::string name;  // class/interface name

    static Type int_t() { return {TypeKind::Int, ""}; }
    static Type bool_t() { return {TypeKind::Bool, ""}; }
    static Type void_t() { return {TypeKind::Void, ""}; }
    static Type class_t(std::string n) { return {TypeKind::Class, std::move(n)}; }
    static Type interface_t(std::string n) { return {TypeKind::Interface, std::move(n)}; }
    static Type invalid() { return {TypeKind::Invalid, ""}; }

    bool is_reference() const { return kind == TypeKind::Class || kind == TypeKind::Interface; }

    std::string render() const {
        switch (kind) {
            case TypeKind::Int: return "int";
            case TypeKind::Bool: return "bool";
            case TypeKind::Void: return "void";
            case TypeKind::Class:
            case TypeKind::Interface: return name;
            case TypeKind::Invalid: return "<invalid>";
        }
        return "<invalid>";
    }

    friend auto operator<=>(const Type&, const Type&) = default;
};

struct TypeInfo {
    std::string name;
    bool is_interface = false;
    const ClassDecl* cls = nullptr;
    const InterfaceDecl* iface = nullptr;
    std::string super;                     // direct superclass, empty if none
    std::vector<std::string> interfaces;   // directly implemented
    std::vector<FieldRef> own_fields;      // document order
};

struct MethodInfo {
    MethodRef ref;
    const MethodDecl* decl = nullptr;    // null for interface signatures
    const MethodSigDecl* sig = nullptr;  // null for class methods
    bool is_static = false;
    bool is_test = false;
    Type return_type;
    std::vector<Type> param_types;
    NodePath path;  // path of the declaration node
};

struct FieldInfo {
    FieldRef ref;
    const FieldDecl* decl = nullptr;
    Type type;
    NodePath path;
};

/// Fully resolved program: hierarchy, member tables, a static type for every
/// expression node, statically resolved call and field-access targets, the
/// override relation, and the ordered test list.
class CheckedProgram {
public:
    Program program;
    std::map<std::string, TypeInfo> types;
    std::map<MethodRef, MethodInfo> methods;
    std::map<FieldRef, FieldInfo> fields;
    std::map<NodePath, Type> static_types;
    std::map<NodePath, MethodRef> call_targets;    // CallExpr -> callee
    std::map<NodePath, FieldRef> read_targets;     // FieldRead -> field
    std::map<NodePath, FieldRef> write_targets;    // AssignField -> field
    std::map<MethodRef, std::vector<MethodRef>> overrides;
    std::vector<MethodRef> tests;                  // document order
    std::vector<MethodRef> methods_in_order;       // document order, sigs included
    std::vector<FieldRef> static_fields_in_order;  // document order

    const TypeInfo* type_info(const std::string& n) const {
        auto it = types.find(n);
        return it == types.end() ? nullptr : &it->second;
    }
    const MethodInfo* method_info(const MethodRef& r) const {
        auto it = methods.find(r);
        return it == methods.end() ? nullptr : &it->second;
    }

    /// Superclass chain starting at `name` (inclusive). Guarded against
    /// cycles so it is safe to call on not-yet-validated hierarchies.
    std::vector<std::string> class_chain(const std::string& name) const {
        std::vector<std::string> chain;
        std::set<std::string> seen;
        const TypeInfo* t = type_info(name);
        while (t && !t->is_interface && seen.insert(t->name).second) {
            chain.push_back(t->name);
            if (t->super.empty()) break;
            t = type_info(t->super);
        }
        return chain;
    }

    /// Nearest-definition lookup: walks the receiver's class chain upward and
    /// returns the first method with the given name; for interfaces, looks at
    /// the interface's own signatures.
    const MethodInfo* resolve_method(const Type& recv, const std::string& name) const {
        if (recv.kind == TypeKind::Interface) return scan_owner(recv.name, name);
        if (recv.kind != TypeKind::Class) return nullptr;
        for (const auto& owner : class_chain(recv.name)) {
            if (const MethodInfo* m = scan_owner(owner, name)) return m;
        }
        return nullptr;
    }

    const FieldInfo* resolve_field(const std::string& class_name, const std::string& name) const {
        for (const auto& owner : class_chain(class_name)) {
            for (const auto& [ref, info] : fields) {
                if (ref.owner == owner && ref.name == name) return &info;
            }
        }
        return nullptr;
    }

private:
    const MethodInfo* scan_owner(const std::string& owner, const std::string& name) const {
        for (const auto& [ref, info] : methods)
            if (ref.owner == owner && ref.name == name) return &info;
        return nullptr;
    }
};

struct CheckResult {
    std::optional<CheckedProgram> checked;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return checked.has_value(); }
};

/// Name resolution and type checking. The program is consumed; on success it
/// is owned by the returned CheckedProgram.
class Checker {
public:
    explicit Checker(Program program) : cp_() { cp_.program = std::move(program); }

    CheckResult run() {
        collect_types();
        if (!has_errors(diags_)) check_hierarchy();
        if (!has_errors(diags_)) collect_members();
        if (!has_errors(diags_)) {
            compute_overrides();
            check_interface_conformance();
        }
        if (!has_errors(diags_)) check_bodies();
        CheckResult r;
        r.diagnostics = std::move(diags_);
        if (!has_errors(r.diagnostics)) r.checked = std::move(cp_);
        return r;
    }

private:
    void error(Span sp, DiagCode code, std::string msg) {
        diags_.push_back({sp, Severity::Error, code, std::move(msg)});
    }

    // -- pass 1: type declarations -----------------------------------------

    void collect_types() {
        for (const auto& d : cp_.program.decls) {
            if (d->kind == NodeKind::ClassDecl) {
                const auto& c = static_cast<const ClassDecl&>(*d);
                if (cp_.types.count(c.name)) {
                    error(c.span, DiagCode::DuplicateDefinition,
                          "duplicate type '" + c.name + "'");
                    continue;
                }
                TypeInfo t;
                t.name = c.name;
                t.cls = &c;
                t.super = c.extends;
                t.interfaces = c.implements;
                cp_.types.emplace(c.name, std::move(t));
            } else {
                const auto& i = static_cast<const InterfaceDecl&>(*d);
                if (cp_.types.count(i.name)) {
                    error(i.span, DiagCode::DuplicateDefinition,
                          "duplicate type '" + i.name + "'");
                    continue;
                }
                TypeInfo t;
                t.name = i.name;
                t.is_interface = true;
                t.iface = &i;
                cp_.types.emplace(i.name, std::move(t));
            }
        }
    }

    void check_hierarchy() {
        for (auto& [name, info] : cp_.types) {
            if (info.is_interface) continue;
            if (!info.super.empty()) {
                const TypeInfo* s = cp_.type_info(info.super);
                if (!s) {
                    error(info.cls->span, DiagCode::UnknownType,
                          "unknown superclass '" + info.super + "'");
                } else if (s->is_interface) {
                    error(info.cls->span, DiagCode::TypeError,
                          "'" + info.super + "' is an interface; use 'implements'");
                }
            }
            for (const auto& i : info.interfaces) {
                const TypeInfo* t = cp_.type_info(i);
                if (!t)
                    error(info.cls->span, DiagCode::UnknownType, "unknown interface '" + i + "'");
                else if (!t->is_interface)
                    error(info.cls->span, DiagCode::TypeError,
                          "'" + i + "' is a class; use 'extends'");
            }
        }
        if (has_errors(diags_)) return;
        // cycle detection over the extends relation
        for (const auto& [name, info] : cp_.types) {
            if (info.is_interface) continue;
            std::set<std::string> seen{name};
            const TypeInfo* t = &info;
            while (t && !t->super.empty()) {
                if (!seen.insert(t->super).second) {
                    error(info.cls->span, DiagCode::InheritanceCycle,
                          "inheritance cycle through '" + name + "'");
                    break;
                }
                t = cp_.type_info(t->super);
            }
        }
    }

    // -- pass 2: member tables ----------------------------------------------

    Type resolve_type(const TypeName& t) {
        if (t.text == "int") return Type::int_t();
        if (t.text == "bool") return Type::bool_t();
        if (t.text == "void") return Type::void_t();
        const TypeInfo* info = cp_.type_info(t.text);
        if (!info) {
            error(t.span, DiagCode::UnknownType, "unknown type '" + t.text + "'");
            return Type::invalid();
        }
        return info->is_interface ? Type::interface_t(t.text) : Type::class_t(t.text);
    }

    void collect_members() {
        for (std::size_t di = 0; di < cp_.program.decls.size(); ++di) {
            const Decl& d = *cp_.program.decls[di];
            NodePath dpath{static_cast<std::uint32_t>(di)};
            if (d.kind == NodeKind::ClassDecl) {
                const auto& c = static_cast<const ClassDecl&>(d);
                TypeInfo& ti = cp_.types.at(c.name);
                std::set<std::string> used;
                for (std::size_t mi = 0; mi < c.members.size(); ++mi) {
                    const MemberDecl& m = *c.members[mi];
                    NodePath mpath = dpath;
                    mpath.push_back(static_cast<std::uint32_t>(mi));
                    if (m.kind == NodeKind::MethodDecl) {
                        const auto& md = static_cast<const MethodDecl&>(m);
                        if (!used.insert(md.name).second) {
                            error(md.span, DiagCode::DuplicateDefinition,
                                  "duplicate member '" + md.name + "' in '" + c.name + "'");
                            continue;
                        }
                        MethodInfo info;
                        info.decl = &md;
                        info.is_static = md.is_static;
                        info.is_test = md.is_test;
                        info.return_type = resolve_type(md.return_type);
                        for (const auto& p : md.params) {
                            Type pt = resolve_type(p.type);
                            if (pt.kind == TypeKind::Void)
                                error(p.type.span, DiagCode::TypeError,
                                      "parameter cannot be void");
                            info.param_types.push_back(pt);
                        }
                        info.ref = make_ref(c.name, md.name, info.param_types, md.is_static);
                        info.path = mpath;
                        if (md.is_test &&
                            (!md.params.empty() || info.return_type.kind != TypeKind::Void)) {
                            error(md.span, DiagCode::SignatureMismatch,
                                  "test method '" + md.name +
                                      "' must take no parameters and return void");
                        }
                        cp_.methods_in_order.push_back(info.ref);
                        if (md.is_test) cp_.tests.push_back(info.ref);
                        cp_.methods.emplace(info.ref, std::move(info));
                    } else {
                        const auto& fd = static_cast<const FieldDecl&>(m);
                        if (!used.insert(fd.name).second) {
                            error(fd.span, DiagCode::DuplicateDefinition,
                                  "duplicate member '" + fd.name + "' in '" + c.name + "'");
                            continue;
                        }
                        FieldInfo info;
                        info.ref = FieldRef{c.name, fd.name, fd.is_static};
                        info.decl = &fd;
                        info.type = resolve_type(fd.type);
                        if (info.type.kind == TypeKind::Void)
                            error(fd.span, DiagCode::TypeError, "field cannot be void");
                        info.path = mpath;
                        ti.own_fields.push_back(info.ref);
                        if (fd.is_static) cp_.static_fields_in_order.push_back(info.ref);
                        cp_.fields.emplace(info.ref, std::move(info));
                    }
                }
            } else {
                const auto& it = static_cast<const InterfaceDecl&>(d);
                std::set<std::string> used;
                for (std::size_t si = 0; si < it.sigs.size(); ++si) {
                    const MethodSigDecl& sg = *it.sigs[si];
                    NodePath spath = dpath;
                    spath.push_back(static_cast<std::uint32_t>(si));
                    if (!used.insert(sg.name).second) {
                        error(sg.span, DiagCode::DuplicateDefinition,
                              "duplicate member '" + sg.name + "' in '" + it.name + "'");
                        continue;
                    }
                    MethodInfo info;
                    info.sig = &sg;
                    info.return_type = resolve_type(sg.return_type);
                    for (const auto& p : sg.params) info.param_types.push_back(resolve_type(p.type));
                    info.ref = make_ref(it.name, sg.name, info.param_types, false);
                    info.path = spath;
                    cp_.methods_in_order.push_back(info.ref);
                    cp_.methods.emplace(info.ref, std::move(info));
                }
            }
        }
        // Field shadowing across the hierarchy is rejected to keep field
        // resolution unambiguous.
        for (const auto& [ref, info] : cp_.fields) {
            const TypeInfo* ti = cp_.type_info(ref.owner);
            if (!ti || ti->super.empty()) continue;
            for (const auto& anc : cp_.class_chain(ti->super)) {
                for (const auto& [oref, oinfo] : cp_.fields) {
                    if (oref.owner == anc && oref.name == ref.name) {
                        error(info.decl->span, DiagCode::DuplicateDefinition,
                              "field '" + ref.name + "' shadows '" + oref.render() + "'");
                    }
                }
            }
        }
    }

    static MethodRef make_ref(const std::string& owner, const std::string& name,
                              const std::vector<Type>& params, bool is_static) {
        MethodRef r;
        r.owner = owner;
        r.name = name;
        r.is_static = is_static;
        for (const auto& p : params) r.params.push_back(p.render());
        return r;
    }

    const MethodInfo* find_in_owner(const std::string& owner, const std::string& name) const {
        for (const auto& [ref, info] : cp_.methods)
            if (ref.owner == owner && ref.name == name) return &info;
        return nullptr;
    }

    // -- pass 3: overrides and conformance ----------------------------------

    void compute_overrides() {
        for (const auto& [ref, info] : cp_.methods) {
            if (!info.decl) continue;  // interface signatures override nothing
            const TypeInfo* owner = cp_.type_info(ref.owner);
            std::vector<MethodRef> parents;
            // nearest declaration in the superclass chain
            if (!owner->super.empty()) {
                for (const auto& anc : cp_.class_chain(owner->super)) {
                    if (const MethodInfo* p = find_in_owner(anc, ref.name)) {
                        if (!signatures_match(info, *p) || info.is_static || p->is_static) {
                            error(info.decl->span, DiagCode::SignatureMismatch,
                                  "'" + ref.render() + "' clashes with '" + p->ref.render() +
                                      "' but signatures differ");
                        } else {
                            parents.push_back(p->ref);
                        }
                        break;
                    }
                }
            }
            // signatures in interfaces implemented by the declaring class
            for (const auto& iname : owner->interfaces) {
                if (const MethodInfo* p = find_in_owner(iname, ref.name)) {
                    if (!signatures_match(info, *p) || info.is_static) {
                        error(info.decl->span, DiagCode::SignatureMismatch,
                              "'" + ref.render() + "' does not match interface method '" +
                                  p->ref.render() + "'");
                    } else {
                        parents.push_back(p->ref);
                    }
                }
            }
            if (!parents.empty()) cp_.overrides.emplace(ref, std::move(parents));
        }
    }

    static bool signatures_match(const MethodInfo& a, const MethodInfo& b) {
        return a.param_types == b.param_types && a.return_type == b.return_type;
    }

    void check_interface_conformance() {
        for (const auto& [name, info] : cp_.types) {
            if (info.is_interface) continue;
            for (const auto& iname : info.interfaces) {
                const TypeInfo* it = cp_.type_info(iname);
                if (!it || !it->iface) continue;
                for (const auto& sg : it->iface->sigs) {
                    const MethodInfo* impl = nullptr;
                    for (const auto& owner : cp_.class_chain(name)) {
                        impl = find_in_owner(owner, sg->name);
                        if (impl) break;
                    }
                    const MethodInfo* isig = find_in_owner(iname, sg->name);
                    if (!impl || impl->is_static || !impl->decl ||
                        (isig && !signatures_match(*impl, *isig))) {
                        error(info.cls->span, DiagCode::SignatureMismatch,
                              "class '" + name + "' does not implement '" + iname + "." +
                                  sg->name + "'");
                    }
                }
            }
        }
    }

    // -- pass 4: bodies ------------------------------------------------------

    struct Scope {
        std::vector<std::pair<std::string, Type>> names;
        std::vector<std::size_t> block_marks;

        void push_block() { block_marks.push_back(names.size()); }
        void pop_block() {
            names.resize(block_marks.back());
            block_marks.pop_back();
        }
        const Type* lookup(const std::string& n) const {
            for (auto it = names.rbegin(); it != names.rend(); ++it)
                if (it->first == n) return &it->second;
            return nullptr;
        }
        bool declare(const std::string& n, Type t) {
            if (lookup(n)) return false;
            names.emplace_back(n, std::move(t));
            return true;
        }
    };

    struct Ctx {
        std::string enclosing_class;
        bool in_static = false;
        Type return_type;
        Scope scope;
    };

    void check_bodies() {
        for (std::size_t di = 0; di < cp_.program.decls.size(); ++di) {
            const Decl& d = *cp_.program.decls[di];
            if (d.kind != NodeKind::ClassDecl) continue;
            const auto& c = static_cast<const ClassDecl&>(d);
            for (std::size_t mi = 0; mi < c.members.size(); ++mi) {
                const MemberDecl& m = *c.members[mi];
                NodePath mpath{static_cast<std::uint32_t>(di), static_cast<std::uint32_t>(mi)};
                if (m.kind == NodeKind::MethodDecl) {
                    const auto& md = static_cast<const MethodDecl&>(m);
                    Ctx ctx;
                    ctx.enclosing_class = c.name;
                    ctx.in_static = md.is_static;
                    ctx.return_type = resolve_type(md.return_type);
                    ctx.scope.push_block();
                    for (const auto& p : md.params) {
                        if (!ctx.scope.declare(p.name, resolve_type(p.type)))
                            error(p.type.span, DiagCode::DuplicateDefinition,
                                  "duplicate parameter '" + p.name + "'");
                    }
                    NodePath bpath = mpath;
                    bpath.push_back(0);
                    check_block(*md.body, bpath, ctx);
                    ctx.scope.pop_block();
                } else {
                    const auto& fd = static_cast<const FieldDecl&>(m);
                    if (fd.init) {
                        Ctx ctx;
                        ctx.enclosing_class = c.name;
                        ctx.in_static = fd.is_static;
                        ctx.return_type = Type::void_t();
                        ctx.scope.push_block();
                        NodePath ipath = mpath;
                        ipath.push_back(0);
                        Type t = check_expr(*fd.init, ipath, ctx);
                        Type ft = resolve_type(fd.type);
                        require_assignable(t, ft, fd.init->span, "field initializer");
                        ctx.scope.pop_block();
                    }
                }
            }
        }
    }

    void check_block(const Block& b, const NodePath& bpath, Ctx& ctx) {
        ctx.scope.push_block();
        for (std::size_t i = 0; i < b.stmts.size(); ++i) {
            NodePath sp = bpath;
            sp.push_back(static_cast<std::uint32_t>(i));
            check_stmt(*b.stmts[i], sp, ctx);
        }
        ctx.scope.pop_block();
    }

    void check_stmt(const Stmt& s, const NodePath& path, Ctx& ctx) {
        switch (s.kind) {
            case NodeKind::LocalDecl: {
                const auto& l = static_cast<const LocalDecl&>(s);
                Type t = resolve_type(l.type);
                if (t.kind == TypeKind::Void)
                    error(l.span, DiagCode::TypeError, "cannot declare a void variable");
                if (l.init) {
                    NodePath ip = path;
                    ip.push_back(0);
                    Type vt = check_expr(*l.init, ip, ctx);
                    require_assignable(vt, t, l.init->span, "initializer");
                }
                if (!ctx.scope.declare(l.name, t))
                    error(l.span, DiagCode::DuplicateDefinition,
                          "duplicate local '" + l.name + "'");
                break;
            }
            case NodeKind::AssignLocal: {
                const auto& a = static_cast<const AssignLocal&>(s);
                const Type* t = ctx.scope.lookup(a.name);
                if (!t) {
                    error(a.span, DiagCode::UnknownName,
                          "unknown local '" + a.name + "' (fields need a receiver)");
                }
                NodePath vp = path;
                vp.push_back(0);
                Type vt = check_expr(*a.value, vp, ctx);
                if (t) require_assignable(vt, *t, a.value->span, "assignment");
                break;
            }
            case NodeKind::AssignField: {
                const auto& a = static_cast<const AssignField&>(s);
                NodePath op = path;
                op.push_back(0);
                NodePath vp = path;
                vp.push_back(1);
                const FieldInfo* fi = resolve_member_field(*a.obj, op, a.field, a.span, ctx);
                Type vt = check_expr(*a.value, vp, ctx);
                if (fi) {
                    cp_.write_targets.emplace(path, fi->ref);
                    require_assignable(vt, fi->type, a.value->span, "field assignment");
                }
                break;
            }
            case NodeKind::IfStmt: {
                const auto& f = static_cast<const IfStmt&>(s);
                NodePath cpth = path;
                cpth.push_back(0);
                Type ct = check_expr(*f.cond, cpth, ctx);
                require_type(ct, Type::bool_t(), f.cond->span, "if condition");
                NodePath tp = path;
                tp.push_back(1);
                check_block(*f.then_block, tp, ctx);
                if (f.else_block) {
                    NodePath ep = path;
                    ep.push_back(2);
                    check_block(*f.else_block, ep, ctx);
                }
                break;
            }
            case NodeKind::WhileStmt: {
                const auto& w = static_cast<const WhileStmt&>(s);
                NodePath cpth = path;
                cpth.push_back(0);
                Type ct = check_expr(*w.cond, cpth, ctx);
                require_type(ct, Type::bool_t(), w.cond->span, "while condition");
                NodePath bp = path;
                bp.push_back(1);
                check_block(*w.body, bp, ctx);
                break;
            }
            case NodeKind::ReturnStmt: {
                const auto& r = static_cast<const ReturnStmt&>(s);
                if (ctx.return_type.kind == TypeKind::Void) {
                    if (r.value)
                        error(r.span, DiagCode::TypeError, "void method returns a value");
                } else if (!r.value) {
                    error(r.span, DiagCode::TypeError, "non-void method returns no value");
                }
                if (r.value) {
                    NodePath vp = path;
                    vp.push_back(0);
                    Type vt = check_expr(*r.value, vp, ctx);
                    if (ctx.return_type.kind != TypeKind::Void)
                        require_assignable(vt, ctx.return_type, r.value->span, "return");
                }
                break;
            }
            case NodeKind::ExprStmt: {
                NodePath ep = path;
                ep.push_back(0);
                check_expr(*static_cast<const ExprStmt&>(s).expr, ep, ctx);
                break;
            }
            case NodeKind::AssertStmt: {
                const auto& a = static_cast<const AssertStmt&>(s);
                NodePath ep = path;
                ep.push_back(0);
                Type t = check_expr(*a.expr, ep, ctx);
                require_type(t, Type::bool_t(), a.expr->span, "assert condition");
                break;
            }
            case NodeKind::Block:
                check_block(static_cast<const Block&>(s), path, ctx);
                break;
            default: break;
        }
    }

    /// Resolves `obj.field` for reads and writes. Handles the class-name
    /// receiver form (`Owner.staticField`) and records the receiver's type.
    const FieldInfo* resolve_member_field(const Expr& obj, const NodePath& obj_path,
                                          const std::string& field, Span sp, Ctx& ctx) {
        if (obj.kind == NodeKind::NameRead) {
            const auto& nr = static_cast<const NameRead&>(obj);
            if (!ctx.scope.lookup(nr.name)) {
                const TypeInfo* ti = cp_.type_info(nr.name);
                if (ti && !ti->is_interface) {
                    record_type(obj_path, Type::class_t(nr.name));
                    const FieldInfo* fi = cp_.resolve_field(nr.name, field);
                    if (!fi) {
                        error(sp, DiagCode::UnknownMember,
                              "no field '" + field + "' in '" + nr.name + "'");
                        return nullptr;
                    }
                    if (!fi->ref.is_static) {
                        error(sp, DiagCode::TypeError,
                              "instance field '" + fi->ref.render() +
                                  "' accessed via class name");
                        return nullptr;
                    }
                    return fi;
                }
            }
        }
        Type ot = check_expr(obj, obj_path, ctx);
        if (ot.kind == TypeKind::Interface) {
            error(sp, DiagCode::TypeError, "interfaces have no fields");
            return nullptr;
        }
        if (ot.kind != TypeKind::Class) {
            if (ot.kind != TypeKind::Invalid)
                error(sp, DiagCode::TypeError,
                      "field access on non-object type '" + ot.render() + "'");
            return nullptr;
        }
        const FieldInfo* fi = cp_.resolve_field(ot.name, field);
        if (!fi) {
            error(sp, DiagCode::UnknownMember, "no field '" + field + "' in '" + ot.name + "'");
            return nullptr;
        }
        if (fi->ref.is_static) {
            error(sp, DiagCode::TypeError,
                  "static field '" + fi->ref.render() + "' accessed via an instance");
            return nullptr;
        }
        return fi;
    }

    void record_type(const NodePath& path, Type t) { cp_.static_types[path] = std::move(t); }

    Type check_expr(const Expr& e, const NodePath& path, Ctx& ctx) {
        Type t = check_expr_inner(e, path, ctx);
        record_type(path, t);
        return t;
    }

    Type check_expr_inner(const Expr& e, const NodePath& path, Ctx& ctx) {
        switch (e.kind) {
            case NodeKind::IntLit: return Type::int_t();
            case NodeKind::BoolLit: return Type::bool_t();
            case NodeKind::ThisExpr:
                if (ctx.in_static) {
                    error(e.span, DiagCode::TypeError, "'this' in a static context");
                    return Type::invalid();
                }
                return Type::class_t(ctx.enclosing_class);
            case NodeKind::NameRead: {
                const auto& nr = static_cast<const NameRead&>(e);
                if (const Type* t = ctx.scope.lookup(nr.name)) return *t;
                error(e.span, DiagCode::UnknownName,
                      "unknown name '" + nr.name + "' (fields need a receiver)");
                return Type::invalid();
            }
            case NodeKind::FieldRead: {
                const auto& fr = static_cast<const FieldRead&>(e);
                NodePath op = path;
                op.push_back(0);
                const FieldInfo* fi =
                    resolve_member_field(*fr.obj, op, fr.field, fr.span, ctx);
                if (!fi) return Type::invalid();
                cp_.read_targets.emplace(path, fi->ref);
                return fi->type;
            }
            case NodeKind::CallExpr: return check_call(static_cast<const CallExpr&>(e), path, ctx);
            case NodeKind::ReflectCall: {
                const auto& rc = static_cast<const ReflectCall&>(e);
                NodePath rp = path;
                rp.push_back(0);
                Type rt = check_expr(*rc.recv, rp, ctx);
                if (!rt.is_reference() && rt.kind != TypeKind::Invalid)
                    error(rc.span, DiagCode::TypeError,
                          "reflect_call receiver must be an object");
                return Type::int_t();
            }
            case NodeKind::AbsCall: {
                const auto& ac = static_cast<const AbsCall&>(e);
                NodePath ap = path;
                ap.push_back(0);
                Type at = check_expr(*ac.arg, ap, ctx);
                require_type(at, Type::int_t(), ac.arg->span, "abs argument");
                return Type::int_t();
            }
            case NodeKind::NewExpr: {
                const auto& ne = static_cast<const NewExpr&>(e);
                const TypeInfo* ti = cp_.type_info(ne.class_name);
                if (!ti) {
                    error(ne.span, DiagCode::UnknownType,
                          "unknown class '" + ne.class_name + "'");
                    return Type::invalid();
                }
                if (ti->is_interface) {
                    error(ne.span, DiagCode::TypeError,
                          "cannot instantiate interface '" + ne.class_name + "'");
                    return Type::invalid();
                }
                return Type::class_t(ne.class_name);
            }
            case NodeKind::BinaryExpr: return check_binary(static_cast<const BinaryExpr&>(e), path, ctx);
            case NodeKind::UnaryExpr: {
                const auto& u = static_cast<const UnaryExpr&>(e);
                NodePath op = path;
                op.push_back(0);
                Type t = check_expr(*u.operand, op, ctx);
                if (u.op == UnaryOp::Not) {
                    require_type(t, Type::bool_t(), u.operand->span, "operand of '!'");
                    return Type::bool_t();
                }
                require_type(t, Type::int_t(), u.operand->span, "operand of unary '-'");
                return Type::int_t();
            }
            default:
                error(e.span, DiagCode::TypeError, "unexpected expression");
                return Type::invalid();
        }
    }

    Type check_call(const CallExpr& c, const NodePath& path, Ctx& ctx) {
        const MethodInfo* target = nullptr;
        std::size_t arg_base = c.recv ? 1 : 0;
        if (!c.recv) {
            // implicit-this call: nearest definition from the enclosing class
            target = cp_.resolve_method(Type::class_t(ctx.enclosing_class), c.name);
            if (!target) {
                error(c.span, DiagCode::UnknownMember,
                      "no method '" + c.name + "' in '" + ctx.enclosing_class + "'");
            } else if (!target->is_static && ctx.in_static) {
                error(c.span, DiagCode::TypeError,
                      "instance method '" + target->ref.render() + "' called from static context");
            }
        } else if (c.recv->kind == NodeKind::NameRead &&
                   !ctx.scope.lookup(static_cast<const NameRead&>(*c.recv).name) &&
                   cp_.type_info(static_cast<const NameRead&>(*c.recv).name)) {
            // class-name receiver: static call
            const auto& nr = static_cast<const NameRead&>(*c.recv);
            const TypeInfo* ti = cp_.type_info(nr.name);
            NodePath rp = path;
            rp.push_back(0);
            record_type(rp, ti->is_interface ? Type::interface_t(nr.name) : Type::class_t(nr.name));
            if (ti->is_interface) {
                error(c.span, DiagCode::TypeError, "interfaces have no static methods");
            } else {
                target = cp_.resolve_method(Type::class_t(nr.name), c.name);
                if (!target)
                    error(c.span, DiagCode::UnknownMember,
                          "no method '" + c.name + "' in '" + nr.name + "'");
                else if (!target->is_static) {
                    error(c.span, DiagCode::TypeError,
                          "instance method '" + target->ref.render() +
                              "' accessed via class name");
                    target = nullptr;
                }
            }
        } else {
            NodePath rp = path;
            rp.push_back(0);
            Type rt = check_expr(*c.recv, rp, ctx);
            if (rt.is_reference()) {
                target = cp_.resolve_method(rt, c.name);
                if (!target)
                    error(c.span, DiagCode::UnknownMember,
                          "no method '" + c.name + "' in '" + rt.name + "'");
                else if (target->is_static) {
                    error(c.span, DiagCode::TypeError,
                          "static method '" + target->ref.render() + "' called via an instance");
                    target = nullptr;
                }
            } else if (rt.kind != TypeKind::Invalid) {
                error(c.span, DiagCode::TypeError,
                      "method call on non-object type '" + rt.render() + "'");
            }
        }
        // arguments are checked regardless so every expression gets a type
        std::vector<Type> arg_types;
        for (std::size_t i = 0; i < c.args.size(); ++i) {
            NodePath ap = path;
            ap.push_back(static_cast<std::uint32_t>(arg_base + i));
            arg_types.push_back(check_expr(*c.args[i], ap, ctx));
        }
        if (!target) return Type::invalid();
        if (arg_types.size() != target->param_types.size()) {
            error(c.span, DiagCode::TypeError,
                  "'" + target->ref.render() + "' expects " +
                      std::to_string(target->param_types.size()) + " argument(s), got " +
                      std::to_string(arg_types.size()));
            return target->return_type;
        }
        for (std::size_t i = 0; i < arg_types.size(); ++i)
            require_assignable(arg_types[i], target->param_types[i], c.args[i]->span, "argument");
        cp_.call_targets.emplace(path, target->ref);
        return target->return_type;
    }

    Type check_binary(const BinaryExpr& b, const NodePath& path, Ctx& ctx) {
        NodePath lp = path;
        lp.push_back(0);
        NodePath rp = path;
        rp.push_back(1);
        Type lt = check_expr(*b.lhs, lp, ctx);
        Type rt = check_expr(*b.rhs, rp, ctx);
        if (lt.kind == TypeKind::Invalid || rt.kind == TypeKind::Invalid) return Type::invalid();
        if (is_arith_op(b.op)) {
            require_type(lt, Type::int_t(), b.lhs->span, "arithmetic operand");
            require_type(rt, Type::int_t(), b.rhs->span, "arithmetic operand");
            return Type::int_t();
        }
        if (b.op == BinaryOp::And || b.op == BinaryOp::Or) {
            require_type(lt, Type::bool_t(), b.lhs->span, "logical operand");
            require_type(rt, Type::bool_t(), b.rhs->span, "logical operand");
            return Type::bool_t();
        }
        if (b.op == BinaryOp::Eq || b.op == BinaryOp::Ne) {
            bool ok = (lt == rt && lt.kind != TypeKind::Void) ||
                      (lt.is_reference() && rt.is_reference() &&
                       (assignable(lt, rt) || assignable(rt, lt)));
            if (!ok)
                error(b.span, DiagCode::TypeError,
                      "cannot compare '" + lt.render() + "' with '" + rt.render() + "'");
            return Type::bool_t();
        }
        // <, <=, >, >=
        require_type(lt, Type::int_t(), b.lhs->span, "relational operand");
        require_type(rt, Type::int_t(), b.rhs->span, "relational operand");
        return Type::bool_t();
    }

    bool assignable(const Type& from, const Type& to) const {
        if (from == to && from.kind != TypeKind::Void && from.kind != TypeKind::Invalid)
            return true;
        if (from.kind == TypeKind::Class && to.kind == TypeKind::Class) {
            for (const auto& anc : cp_.class_chain(from.name))
                if (anc == to.name) return true;
            return false;
        }
        if (from.kind == TypeKind::Class && to.kind == TypeKind::Interface) {
            for (const auto& cls : cp_.class_chain(from.name)) {
                const TypeInfo* ti = cp_.type_info(cls);
                for (const auto& i : ti->interfaces)
                    if (i == to.name) return true;
            }
            return false;
        }
        return false;
    }

    void require_assignable(const Type& from, const Type& to, Span sp, const char* what) {
        if (from.kind == TypeKind::Invalid || to.kind == TypeKind::Invalid) return;
        if (!assignable(from, to))
            error(sp, DiagCode::TypeError,
                  std::string(what) + ": cannot assign '" + from.render() + "' to '" +
                      to.render() + "'");
    }

    void require_type(const Type& got, const Type& want, Span sp, const char* what) {
        if (got.kind == TypeKind::Invalid) return;
        if (!(got == want))
            error(sp, DiagCode::TypeError,
                  std::string(what) + " must be '" + want.render() + "', got '" + got.render() +
                      "'");
    }

    CheckedProgram cp_;
    std::vector<Diagnostic> diags_;
};

inline CheckResult check(Program program) { return Checker(std::move(program)).run(); }

/// Maps a node path to its enclosing method; paths addressing class-level
/// nodes or field initializers have no enclosing method.
inline Result<MethodRef> method_at(const CheckedProgram& checked, const NodePath& path) {
    if (!node_at(checked.program, path))
        return Result<MethodRef>::fail("path does not address a node: " + render_path(path));
    if (path.size() < 3)
        return Result<MethodRef>::fail("no enclosing method at " + render_path(path));
    const Node* decl = checked.program.child(path[0]);
    if (!decl || decl->kind != NodeKind::ClassDecl)
        return Result<MethodRef>::fail("no enclosing method at " + render_path(path));
    const Node* member = decl->child(path[1]);
    if (!member || member->kind != NodeKind::MethodDecl)
        return Result<MethodRef>::fail("no enclosing method at " + render_path(path));
    NodePath mpath{path[0], path[1]};
    for (const auto& [ref, info] : checked.methods)
        if (info.path == mpath) return Result<MethodRef>::ok(ref);
    return Result<MethodRef>::fail("no enclosing method at " + render_path(path));
}

}  // namespace impactlab
