#pragma once

#include <stdexcept>
#include <string>

namespace sparsegof {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Nonzero counts are all equal, so the sparse correction is undefined.
class UniformNonzero : public Error {
public:
    using Error::Error;
};

/// The admissible interval for the zero-cell mass is empty.
class EmptyInterval : public Error {
public:
    EmptyInterval(const std::string& what, long n, long categories, long zeros,
                  double b, double a_min, double a_max)
        : Error(what), n(n), categories(categories), zeros(zeros), b(b),
          a_min(a_min), a_max(a_max) {}

    long n;
    long categories;
    long zeros;
    double b;
    double a_min;
    double a_max;
};

class InvalidH : public Error {
public:
    using Error::Error;
};

class InvalidEpsilon : public Error {
public:
    using Error::Error;
};

/// Direct and closed-form evaluations of a corrected statistic disagree.
class MismatchError : public Error {
public:
    using Error::Error;
};

/// A constructed estimator left the open unit interval.
class InternalError : public Error {
public:
    using Error::Error;
};

class SizeError : public Error {
public:
    using Error::Error;
};

/// Fewer than two rows or columns survive preprocessing.
class DegenerateTable : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what), line(line), column(column) {}

    std::size_t line;
    std::size_t column;
};

class NegativeCount : public ParseError {
public:
    using ParseError::ParseError;
};

class RaggedRows : public ParseError {
public:
    using ParseError::ParseError;
};

}  // namespace sparsegof
