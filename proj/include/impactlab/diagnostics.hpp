#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace impactlab {

/// Location of a token or AST node: unit index within the project plus
/// 1-based line/column of its first character.
struct Span {
    int unit = -1;
    int line = 0;
    int column = 0;

    friend bool operator==(const Span&, const Span&) = default;
};

enum class Severity { Error, Warning };

enum class DiagCode {
    LexError,
    ParseError,
    UnknownType,
    UnknownName,
    UnknownMember,
    SignatureMismatch,
    InheritanceCycle,
    DuplicateDefinition,
    TypeError,
};

inline const char* diag_code_name(DiagCode c) {
    switch (c) {
        case DiagCode::LexError: return "lex-error";
        case DiagCode::ParseError: return "parse-error";
        case DiagCode::UnknownType: return "unknown-type";
        case DiagCode::UnknownName: return "unknown-name";
        case DiagCode::UnknownMember: return "unknown-member";
        case DiagCode::SignatureMismatch: return "signature-mismatch";
        case DiagCode::InheritanceCycle: return "inheritance-cycle";
        case DiagCode::DuplicateDefinition: return "duplicate-definition";
        case DiagCode::TypeError: return "type-error";
    }
    return "unknown";
}

struct Diagnostic {
    Span span;
    Severity severity = Severity::Error;
    DiagCode code = DiagCode::ParseError;
    std::string message;

    std::string render() const {
        std::string s = severity == Severity::Error ? "error" : "warning";
        s += "[";
        s += diag_code_name(code);
        s += "] at ";
        s += std::to_string(span.line);
        s += ":";
        s += std::to_string(span.column);
        s += ": ";
        s += message;
        return s;
    }
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

/// Minimal success-or-message result used by operations whose failure is a
/// caller error rather than a source-level diagnostic.
template <typename T>
class Result {
public:
    static Result ok(T value) {
        Result r;
        r.value_ = std::move(value);
        return r;
    }
    static Result fail(std::string message) {
        Result r;
        r.error_ = std::move(message);
        return r;
    }

    bool ok_p() const { return value_.has_value(); }
    explicit operator bool() const { return ok_p(); }

    T& value() { return *value_; }
    const T& value() const { return *value_; }
    T take() { return std::move(*value_); }
    const std::string& error() const { return error_; }

private:
    std::optional<T> value_;
    std::string error_;
};

}  // namespace impactlab
