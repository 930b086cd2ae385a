#pragma once

#include <stdexcept>
#include <string>

namespace phfem
{

// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error
{
public:
  using Error::Error;
};

class MeshError : public Error
{
public:
  using Error::Error;
};

// Text input error carrying the 1-based line where it was detected.
class ParseError : public Error
{
public:
  ParseError(std::size_t line, const std::string & what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line)
  {
  }

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

class AssemblyError : public Error
{
public:
  using Error::Error;
};

class SolverError : public Error
{
public:
  using Error::Error;
};

// Raised when a time integration cannot continue (instability, loss of
// positivity, inconsistent constraint data).
class NumericalFailure : public Error
{
public:
  using Error::Error;
};

} // namespace phfem
