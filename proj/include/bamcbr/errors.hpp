#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bamcbr {

/// Invalid scenario, policy or similarity configuration. Carries every offending field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message)
        : std::runtime_error(message), issues_{message} {}
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out;
        for (const auto& issue : issues) {
            if (!out.empty()) out += "; ";
            out += issue;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

/// Two problem descriptors that do not share an attribute schema.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The allocation ledger disagrees with itself. Never recoverable.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A report or case-base file that does not parse.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reports that cannot be placed side by side.
class ComparabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace bamcbr
