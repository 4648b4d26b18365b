#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nprr {

using Vector = std::vector<double>;
using VecView = std::span<const double>;
using VecMut = std::span<double>;

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A component oracle was evaluated outside the domain of f(., i).
class DomainError : public Error {
  public:
    DomainError(std::size_t index, const std::string& what)
        : Error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

  private:
    std::size_t index_;
};

/// Invalid algorithm or operator parameter (e.g. step * rho >= 1).
class ParameterError : public Error {
  public:
    using Error::Error;
};

/// Non-finite or malformed numeric input.
class InputError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class DataError : public Error {
  public:
    using Error::Error;
};

/// Non-fatal diagnostics go through a process-wide sink (stderr by default).
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

bool all_finite(VecView v);

}  // namespace nprr
