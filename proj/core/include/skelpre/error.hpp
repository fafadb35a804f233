#pragma once

#include <stdexcept>
#include <string>

namespace skelpre {

// Base class for every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Malformed index structure: out-of-range triplets, non-nested meshes,
// mismatched spaces.
class StructuralError : public Error
{
  public:
    using Error::Error;
};

class NotSpdError : public Error
{
  public:
    using Error::Error;
};

// A dense oracle was asked for a problem larger than its cap.
class SizeCapError : public Error
{
  public:
    using Error::Error;
};

class UnsupportedDegreeError : public Error
{
  public:
    using Error::Error;
};

// Method/degree combination without a solvable local problem
// (e.g. HDG2 with k = 0).
class IncompatibleMethodError : public Error
{
  public:
    using Error::Error;
};

// Operation applied to a mesh of the wrong family.
class DomainError : public Error
{
  public:
    using Error::Error;
};

class ConfigError : public Error
{
  public:
    ConfigError(int line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
    {}

    int line() const noexcept { return line_; }

  private:
    int line_;
};

} // namespace skelpre
