#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace streamcc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document. `line` is 0 when the position is unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line = 0)
        : Error(line ? message + " (line " + std::to_string(line) + ")" : message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a structural rule (dangling arcs, weights, bad limits).
class ValidationError : public Error {
public:
    using Error::Error;
};

class TimestampError : public ParseError {
public:
    TimestampError(const std::string& message, std::size_t row)
        : ParseError(message, 0), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Raised when an XES document contains events without activity or timestamp.
class RejectedEventsError : public ParseError {
public:
    explicit RejectedEventsError(std::vector<std::string> reports);

    const std::vector<std::string>& reports() const noexcept { return reports_; }

private:
    std::vector<std::string> reports_;
};

class FiringNotEnabled : public Error {
public:
    using Error::Error;
};

class SearchBudgetExceeded : public Error {
public:
    SearchBudgetExceeded(std::size_t expansions, std::string case_id = {});

    std::size_t expansions() const noexcept { return expansions_; }
    const std::string& case_id() const noexcept { return case_id_; }

private:
    std::size_t expansions_;
    std::string case_id_;
};

class EmptyWindow : public Error {
public:
    using Error::Error;
};

}  // namespace streamcc
