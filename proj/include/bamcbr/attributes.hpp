#pragma once

#include <map>
#include <string>
#include <variant>

namespace bamcbr {

enum class AttributeKind { Categorical, Numeric };

/// A descriptor attribute. Numeric values carry the range similarity normalizes by.
struct Attribute {
    std::variant<std::string, double> value;
    double lo = 0.0;
    double hi = 1.0;

    static Attribute categorical(std::string v) { return {std::move(v), 0.0, 0.0}; }
    static Attribute numeric(double v, double lo, double hi) { return {v, lo, hi}; }

    AttributeKind kind() const noexcept {
        return std::holds_alternative<std::string>(value) ? AttributeKind::Categorical : AttributeKind::Numeric;
    }
    double number() const { return std::get<double>(value); }
    const std::string& text() const { return std::get<std::string>(value); }

    bool operator==(const Attribute&) const = default;
};

using AttributeMap = std::map<std::string, Attribute>;

} // namespace bamcbr
