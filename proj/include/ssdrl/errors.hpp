#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ssdrl {

// Two particle sets (or a set and a target list) that must share a length do not.
class SizeMismatchError : public std::invalid_argument {
public:
    SizeMismatchError(std::size_t lhs, std::size_t rhs)
        : std::invalid_argument("size mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)),
          lhs_(lhs), rhs_(rhs) {}

    std::size_t lhs() const noexcept { return lhs_; }
    std::size_t rhs() const noexcept { return rhs_; }

private:
    std::size_t lhs_;
    std::size_t rhs_;
};

// An argument lies outside the domain of the function (tau outside (0,1], M < 2, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A Sinkhorn solve produced a non-finite dual.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double temperature)
        : std::runtime_error(what + " (epsilon=" + std::to_string(temperature) + ")"),
          temperature_(temperature) {}

    double temperature() const noexcept { return temperature_; }

private:
    double temperature_;
};

// The proximal descent could not make progress for several consecutive attempts.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::size_t step)
        : std::runtime_error(what + " (gradient step " + std::to_string(step) + ")"), detail_(what), step_(step) {}

    std::size_t step() const noexcept { return step_; }
    // The message without the step suffix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
    std::size_t step_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ssdrl
