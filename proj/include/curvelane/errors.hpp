// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace curvelane {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed backbone encoding string. `field()` names the grammar element that failed.
class SyntaxError : public Error {
public:
    SyntaxError(std::string field, const std::string& what)
        : Error("syntax error in " + field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Well-formed genome that violates a search-space invariant.
class ConstraintError : public Error {
public:
    ConstraintError(std::string field, const std::string& what)
        : Error("constraint violated on " + field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class ExhaustedError : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

class DuplicateError : public Error {
public:
    using Error::Error;
};

class EmptyArchiveError : public Error {
public:
    using Error::Error;
};

class EmptyDatasetError : public Error {
public:
    using Error::Error;
};

class DegenerateLineError : public Error {
public:
    using Error::Error;
};

/// Failure of a single candidate evaluation; the search logs it and moves on.
class EvaluatorError : public Error {
public:
    EvaluatorError(std::uint64_t eval_id, const std::string& cause)
        : Error("evaluation " + std::to_string(eval_id) + " failed: " + cause), eval_id_(eval_id), cause_(cause) {}
    std::uint64_t eval_id() const noexcept { return eval_id_; }
    const std::string& cause() const noexcept { return cause_; }

private:
    std::uint64_t eval_id_;
    std::string cause_;
};

class TimeoutError : public EvaluatorError {
public:
    using EvaluatorError::EvaluatorError;
};

class ProtocolError : public EvaluatorError {
public:
    using EvaluatorError::EvaluatorError;
};

class SpawnError : public EvaluatorError {
public:
    using EvaluatorError::EvaluatorError;
};

/// Text-format parse failure with 1-based line number and the offending token.
class FormatError : public Error {
public:
    FormatError(std::size_t line, std::string token, const std::string& what)
        : Error("format error at line " + std::to_string(line) + " near '" + token + "': " + what),
          line_(line), token_(std::move(token)) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& token() const noexcept { return token_; }

private:
    std::size_t line_;
    std::string token_;
};

/// JSON document does not match the expected schema; `path()` is a JSON path like `heads[0].cells[3].score`.
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& what)
        : Error("schema error at " + path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class VersionError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace curvelane
