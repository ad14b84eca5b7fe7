#pragma once

#include <compare>
#include <string>
#include <vector>

namespace impactlab {

/// Identifies a method (or interface method signature) by owner, name and
/// parameter types. Rendering is injective because member names are unique
/// per type: `Owner.name(T1,T2)`.
struct MethodRef {
    std::string owner;
    std::string name;
    std::vector<std::string> params;
    bool is_static = false;

    std::string render() const {
        std::string s = owner;
        s += ".";
        s += name;
        s += "(";
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i) s += ",";
            s += params[i];
        }
        s += ")";
        return s;
    }

    friend auto operator<=>(const MethodRef&, const MethodRef&) = default;
};

/// Identifies a field; rendered `Owner#name`.
struct FieldRef {
    std::string owner;
    std::string name;
    bool is_static = false;

    std::string render() const { return owner + "#" + name; }

    friend auto operator<=>(const FieldRef&, const FieldRef&) = default;
};

}  // namespace impactlab
