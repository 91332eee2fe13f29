#ifndef ORBITA_ERROR_HPP
#define ORBITA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace orbita {

/// Raised when an argument lies outside an operation's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a trajectory cannot be continued.
class IntegrationError : public std::runtime_error {
public:
    enum class Kind { collision, step_limit, step_underflow };

    IntegrationError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Raised when a quadrature cannot meet the requested accuracy.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace orbita

#endif  // ORBITA_ERROR_HPP
