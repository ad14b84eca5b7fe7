#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "impactlab/checker.hpp"

namespace impactlab {

enum class TestStatus { Pass, AssertFail, RuntimeError, Timeout };

inline const char* test_status_name(TestStatus s) {
    switch (s) {
        case TestStatus::Pass: return "pass";
        case TestStatus::AssertFail: return "assert-fail";
        case TestStatus::RuntimeError: return "runtime-error";
        case TestStatus::Timeout: return "timeout";
    }
    return "?";
}

struct TestOutcome {
    MethodRef test;
    TestStatus status = TestStatus::Pass;
    std::uint64_t steps_used = 0;
    std::string detail;

    bool failing() const { return status != TestStatus::Pass; }
};

struct SuiteResult {
    std::map<MethodRef, TestOutcome> outcomes;
    double wall_time_ms = 0.0;
};

namespace interp {

struct Object;
using ObjPtr = std::shared_ptr<Object>;

struct VoidTag {
    bool operator==(const VoidTag&) const { return true; }
};

using Value = std::variant<std::monostate, std::int64_t, bool, ObjPtr, VoidTag>;

struct Object {
    const std::string* class_name = nullptr;
    std::vector<Value> fields;
};

struct RuntimeSignal {
    std::string message;
};
struct AssertSignal {
    std::string message;
};
struct TimeoutSignal {};

/// Deterministic tree-walking evaluator over a CheckedProgram. All lookup
/// tables are precomputed so repeated suite runs only pay for evaluation.
/// One Machine must not be shared across threads; each concurrent suite run
/// gets its own instance over its own CheckedProgram.
class Machine {
public:
    explicit Machine(const CheckedProgram& cp) : cp_(cp) { build_tables(); }

    static constexpr std::uint64_t kDefaultBudget = 1'000'000;
    static constexpr int kMaxCallDepth = 1024;

    TestOutcome run_test(const MethodRef& test, std::uint64_t step_budget) {
        TestOutcome out;
        out.test = test;
        steps_ = 0;
        budget_ = step_budget == 0 ? 1 : step_budget;
        depth_ = 0;
        try {
            init_statics();
            const MethodInfo* mi = cp_.method_info(test);
            if (!mi || !mi->decl) throw RuntimeSignal{"unknown test " + test.render()};
            ObjPtr self;
            if (!mi->is_static) self = instantiate(test.owner);
            invoke_with_frame(*mi, self, {});
            out.status = TestStatus::Pass;
        } catch (const AssertSignal& a) {
            out.status = TestStatus::AssertFail;
            out.detail = a.message;
        } catch (const RuntimeSignal& r) {
            out.status = TestStatus::RuntimeError;
            out.detail = r.message;
        } catch (const TimeoutSignal&) {
            out.status = TestStatus::Timeout;
            out.detail = "step budget exhausted";
        }
        out.steps_used = steps_;
        return out;
    }

private:
    // -- precomputed tables ---------------------------------------------------

    struct Layout {
        std::vector<const FieldInfo*> slots;              // root-first document order
        std::unordered_map<std::string, std::size_t> index;  // field name -> slot
    };

    void build_tables() {
        // path-keyed checker maps become node-keyed for O(1) evaluation lookups
        walk_with_paths(cp_.program, [&](const Node& n, const NodePath& path) {
            if (n.kind == NodeKind::CallExpr) {
                auto it = cp_.call_targets.find(path);
                if (it != cp_.call_targets.end())
                    call_target_[&n] = cp_.method_info(it->second);
            } else if (n.kind == NodeKind::FieldRead) {
                auto it = cp_.read_targets.find(path);
                if (it != cp_.read_targets.end()) field_target_[&n] = it->second;
            } else if (n.kind == NodeKind::AssignField) {
                auto it = cp_.write_targets.find(path);
                if (it != cp_.write_targets.end()) field_target_[&n] = it->second;
            }
        });
        for (const auto& [name, info] : cp_.types) {
            if (info.is_interface) continue;
            Layout lay;
            auto chain = cp_.class_chain(name);
            for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                const TypeInfo* ti = cp_.type_info(*it);
                for (const auto& fref : ti->own_fields) {
                    const FieldInfo* fi = &cp_.fields.at(fref);
                    if (fref.is_static) continue;
                    lay.index[fref.name] = lay.slots.size();
                    lay.slots.push_back(fi);
                }
            }
            layouts_.emplace(name, std::move(lay));
            // dynamic dispatch: nearest body walking up from each class
            for (const auto& owner : cp_.class_chain(name)) {
                for (const auto& [ref, mi] : cp_.methods) {
                    if (ref.owner != owner || !mi.decl || mi.is_static) continue;
                    dispatch_.emplace(name + "::" + ref.name, &mi);
                }
            }
        }
        for (std::size_t i = 0; i < cp_.static_fields_in_order.size(); ++i)
            static_slot_[cp_.static_fields_in_order[i]] = i;
        statics_.resize(cp_.static_fields_in_order.size());
    }

    // -- stepping --------------------------------------------------------------

    void step() {
        if (++steps_ >= budget_) {
            steps_ = budget_;
            throw TimeoutSignal{};
        }
    }

    // -- program state -----------------------------------------------------------

    void init_statics() {
        for (auto& v : statics_) v = std::monostate{};
        for (std::size_t i = 0; i < cp_.static_fields_in_order.size(); ++i) {
            const FieldInfo& fi = cp_.fields.at(cp_.static_fields_in_order[i]);
            statics_[i] = default_value(fi.type);
        }
        for (std::size_t i = 0; i < cp_.static_fields_in_order.size(); ++i) {
            const FieldInfo& fi = cp_.fields.at(cp_.static_fields_in_order[i]);
            if (fi.decl->init) {
                try {
                    statics_[i] = eval(*fi.decl->init, nullptr);
                } catch (const AssertSignal&) {
                    throw RuntimeSignal{"static initializer failed for " + fi.ref.render()};
                } catch (RuntimeSignal& r) {
                    r.message = "static initializer of " + fi.ref.render() + ": " + r.message;
                    throw;
                }
            }
        }
    }

    static Value default_value(const Type& t) {
        switch (t.kind) {
            case TypeKind::Int: return std::int64_t{0};
            case TypeKind::Bool: return false;
            default: return std::monostate{};
        }
    }

    ObjPtr instantiate(const std::string& class_name) {
        const TypeInfo* ti = cp_.type_info(class_name);
        const Layout& lay = layouts_.at(class_name);
        auto obj = std::make_shared<Object>();
        obj->class_name = &ti->name;
        obj->fields.resize(lay.slots.size());
        for (std::size_t i = 0; i < lay.slots.size(); ++i)
            obj->fields[i] = default_value(lay.slots[i]->type);
        for (std::size_t i = 0; i < lay.slots.size(); ++i) {
            const FieldInfo* fi = lay.slots[i];
            if (fi->decl->init) obj->fields[i] = eval(*fi->decl->init, obj);
        }
        return obj;
    }

    // -- frames -------------------------------------------------------------------

    struct Frame {
        std::vector<std::pair<std::string_view, Value>> locals;
        std::vector<std::size_t> marks;

        void push_block() { marks.push_back(locals.size()); }
        void pop_block() {
            locals.resize(marks.back());
            marks.pop_back();
        }
        Value* lookup(std::string_view n) {
            for (auto it = locals.rbegin(); it != locals.rend(); ++it)
                if (it->first == n) return &it->second;
            return nullptr;
        }
    };

    /// Returns true when the block executed a `return`.
    bool exec_block(const Block& b, Frame& frame, const ObjPtr& self, Value& ret) {
        frame.push_block();
        for (const auto& s : b.stmts) {
            if (exec_stmt(*s, frame, self, ret)) {
                frame.pop_block();
                return true;
            }
        }
        frame.pop_block();
        return false;
    }

    bool exec_stmt(const Stmt& s, Frame& frame, const ObjPtr& self, Value& ret) {
        step();
        switch (s.kind) {
            case NodeKind::LocalDecl: {
                const auto& l = static_cast<const LocalDecl&>(s);
                Value v;
                if (l.init)
                    v = eval(*l.init, self);
                else
                    v = default_for_type_text(l.type.text);
                frame.locals.emplace_back(l.name, std::move(v));
                return false;
            }
            case NodeKind::AssignLocal: {
                const auto& a = static_cast<const AssignLocal&>(s);
                Value v = eval(*a.value, self);
                *frame_lookup(frame, a.name) = std::move(v);
                return false;
            }
            case NodeKind::AssignField: {
                const auto& a = static_cast<const AssignField&>(s);
                const FieldRef& fref = field_target_.at(&s);
                if (fref.is_static) {
                    Value v = eval(*a.value, self);
                    statics_[static_slot_.at(fref)] = std::move(v);
                } else {
                    ObjPtr obj = eval_receiver(*a.obj, self);
                    Value v = eval(*a.value, self);
                    obj->fields[layouts_.at(*obj->class_name).index.at(fref.name)] = std::move(v);
                }
                return false;
            }
            case NodeKind::IfStmt: {
                const auto& f = static_cast<const IfStmt&>(s);
                if (as_bool(eval(*f.cond, self)))
                    return exec_block(*f.then_block, frame, self, ret);
                if (f.else_block) return exec_block(*f.else_block, frame, self, ret);
                return false;
            }
            case NodeKind::WhileStmt: {
                const auto& w = static_cast<const WhileStmt&>(s);
                while (as_bool(eval(*w.cond, self))) {
                    if (exec_block(*w.body, frame, self, ret)) return true;
                }
                return false;
            }
            case NodeKind::ReturnStmt: {
                const auto& r = static_cast<const ReturnStmt&>(s);
                ret = r.value ? eval(*r.value, self) : Value{VoidTag{}};
                return true;
            }
            case NodeKind::ExprStmt:
                eval(*static_cast<const ExprStmt&>(s).expr, self);
                return false;
            case NodeKind::AssertStmt: {
                const auto& a = static_cast<const AssertStmt&>(s);
                if (!as_bool(eval(*a.expr, self)))
                    throw AssertSignal{"assertion failed at line " +
                                       std::to_string(a.span.line)};
                return false;
            }
            case NodeKind::Block:
                return exec_block(static_cast<const Block&>(s), frame, self, ret);
            default:
                throw RuntimeSignal{"unexpected statement"};
        }
    }

    Value* frame_lookup(Frame& frame, std::string_view name) {
        Value* v = frame.lookup(name);
        if (!v) throw RuntimeSignal{"unbound local '" + std::string(name) + "'"};
        return v;
    }

    static Value default_for_type_text(const std::string& t) {
        if (t == "int") return std::int64_t{0};
        if (t == "bool") return false;
        return std::monostate{};
    }

    // -- expression evaluation ------------------------------------------------

    Value eval(const Expr& e, const ObjPtr& self) {
        step();
        switch (e.kind) {
            case NodeKind::IntLit: return static_cast<const IntLit&>(e).value;
            case NodeKind::BoolLit: return static_cast<const BoolLit&>(e).value;
            case NodeKind::ThisExpr: return self;
            case NodeKind::NameRead: {
                // Locals live in the active frame; the checker guarantees the
                // name is a local or parameter here.
                const auto& nr = static_cast<const NameRead&>(e);
                Value* v = current_frame_->lookup(nr.name);
                if (!v) throw RuntimeSignal{"unbound name '" + nr.name + "'"};
                return *v;
            }
            case NodeKind::FieldRead: {
                const auto& fr = static_cast<const FieldRead&>(e);
                const FieldRef& fref = field_target_.at(&e);
                if (fref.is_static) return statics_[static_slot_.at(fref)];
                ObjPtr obj = eval_receiver(*fr.obj, self);
                return obj->fields[layouts_.at(*obj->class_name).index.at(fref.name)];
            }
            case NodeKind::CallExpr: return eval_call(static_cast<const CallExpr&>(e), self);
            case NodeKind::ReflectCall: return eval_reflect(static_cast<const ReflectCall&>(e), self);
            case NodeKind::AbsCall: {
                std::int64_t v = as_int(eval(*static_cast<const AbsCall&>(e).arg, self));
                return v < 0 ? wrap_neg(v) : v;
            }
            case NodeKind::NewExpr:
                return instantiate(static_cast<const NewExpr&>(e).class_name);
            case NodeKind::BinaryExpr: return eval_binary(static_cast<const BinaryExpr&>(e), self);
            case NodeKind::UnaryExpr: {
                const auto& u = static_cast<const UnaryExpr&>(e);
                if (u.op == UnaryOp::Not) return !as_bool(eval(*u.operand, self));
                return wrap_neg(as_int(eval(*u.operand, self)));
            }
            default: throw RuntimeSignal{"unexpected expression"};
        }
    }

    /// Evaluates a receiver expression and requires a non-null object.
    ObjPtr eval_receiver(const Expr& e, const ObjPtr& self) {
        Value v = eval(e, self);
        if (auto* p = std::get_if<ObjPtr>(&v)) {
            if (*p) return *p;
        }
        if (std::holds_alternative<std::monostate>(v))
            throw RuntimeSignal{"null receiver at line " + std::to_string(e.span.line)};
        throw RuntimeSignal{"receiver is not an object"};
    }

    Value eval_call(const CallExpr& c, const ObjPtr& self) {
        const MethodInfo* target = call_target_.at(&c);
        std::vector<Value> args;
        args.reserve(c.args.size());

        if (target->is_static) {
            // class-name receivers are names, not evaluated expressions
            for (const auto& a : c.args) args.push_back(eval(*a, self));
            return invoke_with_frame(*target, nullptr, std::move(args));
        }
        ObjPtr recv = c.recv ? eval_receiver(*c.recv, self) : require_self(self, c);
        for (const auto& a : c.args) args.push_back(eval(*a, self));
        // dynamic dispatch: most-derived body for the receiver's runtime class
        const MethodInfo* dispatched = dispatch_lookup(*recv->class_name, target->ref.name);
        if (!dispatched)
            throw RuntimeSignal{"no body for " + target->ref.render() + " on " +
                                *recv->class_name};
        return invoke_with_frame(*dispatched, recv, std::move(args));
    }

    ObjPtr require_self(const ObjPtr& self, const CallExpr& c) {
        if (!self)
            throw RuntimeSignal{"implicit-this call without receiver at line " +
                                std::to_string(c.span.line)};
        return self;
    }

    Value eval_reflect(const ReflectCall& rc, const ObjPtr& self) {
        ObjPtr recv = eval_receiver(*rc.recv, self);
        const MethodInfo* mi = dispatch_lookup(*recv->class_name, rc.method_name);
        if (!mi)
            throw RuntimeSignal{"reflect_call: no method '" + rc.method_name + "' on " +
                                *recv->class_name};
        if (!mi->param_types.empty())
            throw RuntimeSignal{"reflect_call: '" + rc.method_name + "' takes parameters"};
        Value v = invoke_with_frame(*mi, recv, {});
        if (!std::holds_alternative<std::int64_t>(v))
            throw RuntimeSignal{"reflect_call: '" + rc.method_name + "' did not return int"};
        return v;
    }

    const MethodInfo* dispatch_lookup(const std::string& cls, const std::string& name) {
        auto it = dispatch_.find(cls + "::" + name);
        return it == dispatch_.end() ? nullptr : it->second;
    }

    /// invoke() with frame bookkeeping so NameRead sees the callee frame.
    Value invoke_with_frame(const MethodInfo& mi, const ObjPtr& self, std::vector<Value> args) {
        Frame* saved = current_frame_;
        Value v;
        try {
            v = invoke_in(mi, self, std::move(args));
        } catch (...) {
            current_frame_ = saved;
            throw;
        }
        current_frame_ = saved;
        return v;
    }

    Value invoke_in(const MethodInfo& mi, const ObjPtr& self, std::vector<Value> args) {
        if (depth_ + 1 > kMaxCallDepth)
            throw RuntimeSignal{"call depth limit exceeded in " + mi.ref.render()};
        ++depth_;
        Frame frame;
        frame.push_block();
        for (std::size_t i = 0; i < mi.decl->params.size(); ++i)
            frame.locals.emplace_back(mi.decl->params[i].name, std::move(args[i]));
        current_frame_ = &frame;
        Value ret = VoidTag{};
        bool returned = exec_block(*mi.decl->body, frame, self, ret);
        --depth_;
        if (!returned) {
            if (mi.return_type.kind != TypeKind::Void)
                throw RuntimeSignal{"method " + mi.ref.render() + " ended without a return value"};
            return VoidTag{};
        }
        return ret;
    }

    Value eval_binary(const BinaryExpr& b, const ObjPtr& self) {
        if (b.op == BinaryOp::And) {
            if (!as_bool(eval(*b.lhs, self))) return false;
            return as_bool(eval(*b.rhs, self));
        }
        if (b.op == BinaryOp::Or) {
            if (as_bool(eval(*b.lhs, self))) return true;
            return as_bool(eval(*b.rhs, self));
        }
        Value lv = eval(*b.lhs, self);
        Value rv = eval(*b.rhs, self);
        if (b.op == BinaryOp::Eq || b.op == BinaryOp::Ne) {
            bool eq = values_equal(lv, rv);
            return b.op == BinaryOp::Eq ? eq : !eq;
        }
        std::int64_t l = as_int(lv);
        std::int64_t r = as_int(rv);
        switch (b.op) {
            case BinaryOp::Add: return wrap(static_cast<std::uint64_t>(l) + static_cast<std::uint64_t>(r));
            case BinaryOp::Sub: return wrap(static_cast<std::uint64_t>(l) - static_cast<std::uint64_t>(r));
            case BinaryOp::Mul: return wrap(static_cast<std::uint64_t>(l) * static_cast<std::uint64_t>(r));
            case BinaryOp::Div:
                if (r == 0)
                    throw RuntimeSignal{"division by zero at line " + std::to_string(b.span.line)};
                if (l == INT64_MIN && r == -1) return l;
                return l / r;
            case BinaryOp::Mod:
                if (r == 0)
                    throw RuntimeSignal{"modulo by zero at line " + std::to_string(b.span.line)};
                if (l == INT64_MIN && r == -1) return std::int64_t{0};
                return l % r;
            case BinaryOp::Lt: return l < r;
            case BinaryOp::Le: return l <= r;
            case BinaryOp::Gt: return l > r;
            case BinaryOp::Ge: return l >= r;
            default: throw RuntimeSignal{"unexpected operator"};
        }
    }

    static bool values_equal(const Value& a, const Value& b) {
        if (a.index() != b.index()) {
            // null compared with an object reference
            bool a_null = std::holds_alternative<std::monostate>(a);
            bool b_null = std::holds_alternative<std::monostate>(b);
            if ((a_null && std::holds_alternative<ObjPtr>(b)) ||
                (b_null && std::holds_alternative<ObjPtr>(a)))
                return false;
            throw RuntimeSignal{"comparison of incompatible values"};
        }
        if (auto* i = std::get_if<std::int64_t>(&a)) return *i == std::get<std::int64_t>(b);
        if (auto* bo = std::get_if<bool>(&a)) return *bo == std::get<bool>(b);
        if (auto* o = std::get_if<ObjPtr>(&a)) return o->get() == std::get<ObjPtr>(b).get();
        if (std::holds_alternative<std::monostate>(a)) return true;  // null == null
        throw RuntimeSignal{"comparison of incomparable values"};
    }

    static std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }
    static std::int64_t wrap_neg(std::int64_t v) {
        return wrap(0ull - static_cast<std::uint64_t>(v));
    }

    static std::int64_t as_int(const Value& v) {
        if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
        throw RuntimeSignal{"expected an int value"};
    }
    static bool as_bool(const Value& v) {
        if (auto* b = std::get_if<bool>(&v)) return *b;
        throw RuntimeSignal{"expected a bool value"};
    }

    const CheckedProgram& cp_;
    std::unordered_map<const Node*, const MethodInfo*> call_target_;
    std::unordered_map<const Node*, FieldRef> field_target_;
    std::map<std::string, Layout> layouts_;
    std::unordered_map<std::string, const MethodInfo*> dispatch_;  // "Class::name"
    std::map<FieldRef, std::size_t> static_slot_;
    std::vector<Value> statics_;
    std::uint64_t steps_ = 0;
    std::uint64_t budget_ = kDefaultBudget;
    int depth_ = 0;
    Frame* current_frame_ = nullptr;
};

}  // namespace interp

/// Runs one test on fresh program state.
inline TestOutcome run_test(const CheckedProgram& checked, const MethodRef& test,
                            std::uint64_t step_budget) {
    interp::Machine machine(checked);
    return machine.run_test(test, step_budget);
}

/// Runs the whole suite in declaration order; every test starts from fresh
/// static state, so outcomes are independent of execution order.
inline SuiteResult run_suite(const CheckedProgram& checked,
                             std::uint64_t step_budget = interp::Machine::kDefaultBudget) {
    SuiteResult result;
    interp::Machine machine(checked);
    auto t0 = std::chrono::steady_clock::now();
    for (const auto& test : checked.tests)
        result.outcomes.emplace(test, machine.run_test(test, step_budget));
    auto t1 = std::chrono::steady_clock::now();
    result.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return result;
}

}  // namespace impactlab
