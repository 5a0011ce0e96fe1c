// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace remat {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed policy or chain document.
class ParseError : public Error {
public:
    ParseError(std::string field, const std::string& what)
        : Error("parse error in field '" + field + "': " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Well-formed data that violates a table invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Bad parameters: budget below one unit, policy/model mismatch, uncovered (t, m).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A recomputed state differs from the one first produced at that position.
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// Problem size exceeds a configured cap.
class LimitError : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, int smallest_admissible_budget)
        : Error(what), smallest_admissible_budget_(smallest_admissible_budget) {}
    int smallest_admissible_budget() const noexcept { return smallest_admissible_budget_; }

private:
    int smallest_admissible_budget_;
};

}  // namespace remat
