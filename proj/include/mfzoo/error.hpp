#pragma once

#include <stdexcept>
#include <string>

namespace mfzoo {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "error"; }
};

class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain"; }
};

class InsufficientData : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "insufficient_data"; }
};

class BudgetError : public Error {
public:
    BudgetError(int level, const std::string& what) : Error(what), level_(level) {}
    int level() const noexcept { return level_; }
    const char* kind() const noexcept override { return "budget"; }

private:
    int level_;
};

class StageError : public Error {
public:
    StageError(std::string stage, int k, const std::string& what)
        : Error(what), stage_(std::move(stage)), k_(k) {}
    const std::string& stage() const noexcept { return stage_; }
    int k() const noexcept { return k_; }
    const char* kind() const noexcept override { return "stage"; }

private:
    std::string stage_;
    int k_;
};

class FormatError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "format"; }
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io"; }
};

} // namespace mfzoo
