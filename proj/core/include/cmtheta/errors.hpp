#pragma once

#include <stdexcept>
#include <string>

namespace cmtheta {

// Base class for all library errors.  `code()` is a stable machine-readable
// identifier used by the CLI when serializing failures into reports.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// An ideal expected to be principal has no generator.
class NotPrincipalError : public Error {
public:
    explicit NotPrincipalError(const std::string& what)
        : Error("not_principal", what) {}
};

// An element cannot be reduced modulo p because p divides a denominator.
class NotIntegralError : public Error {
public:
    explicit NotIntegralError(const std::string& what)
        : Error("not_p_integral", what) {}
};

// No residue field of bounded degree supports all required root choices.
class ResidueChoiceError : public Error {
public:
    explicit ResidueChoiceError(const std::string& what)
        : Error("residue_choice_unavailable", what) {}
};

// A q-expansion operation would leave fewer retained coefficients than the
// minimum contract allows.
class InsufficientPrecisionError : public Error {
public:
    explicit InsufficientPrecisionError(const std::string& what)
        : Error("insufficient_precision", what) {}
};

// Local factor requested at a prime where it is not defined.
class BadEulerPrimeError : public Error {
public:
    explicit BadEulerPrimeError(const std::string& what)
        : Error("bad_euler_prime", what) {}
};

// Ill-typed symbolic expression (mismatched levels, unknown operator, ...).
class TypeError : public Error {
public:
    TypeError(const std::string& what, std::size_t position)
        : Error("type_error", what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// A bound computation is missing one or more named inputs.
class MissingInputError : public Error {
public:
    explicit MissingInputError(const std::string& what)
        : Error("missing_input", what) {}
};

// p-adic precision exhausted before the requested quantity was determined.
class PrecisionExceededError : public Error {
public:
    explicit PrecisionExceededError(const std::string& what)
        : Error("precision_exceeded", what) {}
};

// Attempt to invert a zero divisor in an etale value ring.
class ZeroDivisorError : public Error {
public:
    explicit ZeroDivisorError(const std::string& what)
        : Error("zero_divisor", what) {}
};

// Evaluation of a character at an ideal sharing a factor with the modulus.
class CoprimalityError : public Error {
public:
    explicit CoprimalityError(const std::string& what)
        : Error("coprimality_violation", what) {}
};

// Catch-all for invalid arguments (non-coprime ideals, bad HNF triples, ...).
class BadInputError : public Error {
public:
    explicit BadInputError(const std::string& what)
        : Error("bad_input", what) {}
};

} // namespace cmtheta
