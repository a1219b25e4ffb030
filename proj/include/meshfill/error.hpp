#pragma once

#include <stdexcept>
#include <string>

namespace meshfill {

/// Invalid parameterization. The message always names the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Argument outside an operation's domain (empty sets, length mismatch, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace meshfill
