#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vrf {

/// Broad failure category; the CLI maps it to an exit code.
enum class ErrorKind {
    Syntax,   ///< formula text does not parse
    Type,     ///< static type or dimension mismatch
    Eval,     ///< evaluation failure (singular matrix, division by zero, ...)
    Numeric,  ///< non-finite values during evaluation or integration
    Frame,    ///< unknown frame or invalid frame forest
    Scene,    ///< structural scene problems
    Io,       ///< unreadable or unwritable files
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// True for failures that originate in the formula language.
    bool is_formula_error() const noexcept {
        return kind_ == ErrorKind::Syntax || kind_ == ErrorKind::Type || kind_ == ErrorKind::Eval;
    }

  private:
    ErrorKind kind_;
};

class ParseError : public Error {
  public:
    ParseError(std::size_t offset, std::string expected)
        : Error(ErrorKind::Syntax,
                "syntax error at offset " + std::to_string(offset) + ": expected " + expected),
          offset_(offset), expected_(std::move(expected)) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string& expected() const noexcept { return expected_; }

  private:
    std::size_t offset_;
    std::string expected_;
};

class TypeError : public Error {
  public:
    explicit TypeError(const std::string& what) : Error(ErrorKind::Type, what) {}
};

class EvalError : public Error {
  public:
    explicit EvalError(const std::string& what) : Error(ErrorKind::Eval, what) {}
};

class NumericError : public Error {
  public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

class FrameError : public Error {
  public:
    explicit FrameError(const std::string& what) : Error(ErrorKind::Frame, what) {}
};

class SceneError : public Error {
  public:
    explicit SceneError(const std::string& what) : Error(ErrorKind::Scene, what) {}
};

class IoError : public Error {
  public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

/// Re-throws `e` with `context` prepended, keeping its kind.
[[noreturn]] inline void rethrow_with_context(const Error& e, const std::string& context) {
    throw Error(e.kind(), context + ": " + e.what());
}

}  // namespace vrf
