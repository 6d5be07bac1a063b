#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kreeb {

enum class ErrorKind {
  Syntax,
  NotPeriodic,
  InvalidResolution,
  DegenerateCritical,
  CriticalLevel,
  NoCrossing,
  MultipleCycles,
  NoCycle,
  Topology,
  MixedContext,
  WrongContext,
  InvalidIndex,
  NotAbelian,
  Domain,
  UnsupportedField,
  NonBijective,
  NotFixedOnCurves,
  NotInDelta,
  NotDiffeo,
  NotCurvePreserving,
  NonUniformShift,
  DiscontinuousLift,
  NotInvariant,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure; `offset` is the byte offset into the source text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& what)
      : Error(ErrorKind::Syntax, what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace kreeb
