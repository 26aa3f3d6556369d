#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace ctcsim {

struct ProjectionSet;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two states share a channel label.
class LabelCollision : public Error {
 public:
  using Error::Error;
};

// Operator dimension does not match the number of targets.
class ArityError : public Error {
 public:
  using Error::Error;
};

// A gate or query names a channel that does not exist.
class LabelError : public Error {
 public:
  using Error::Error;
};

// Invalid circuit, model or document content.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class NoCtcError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Quadrature did not converge.
class NumericsError : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Zero noise has no finite skew factor.
class InfiniteSkew : public Error {
 public:
  using Error::Error;
};

// The post-selection has (numerically) zero acceptance. When raised by the
// engine it carries the full projection set so the caller can inspect which
// orthogonal branches the circuit actually populates.
class ParadoxError : public Error {
 public:
  explicit ParadoxError(const std::string& what,
                        std::shared_ptr<const ProjectionSet> projections = {})
      : Error(what), projections_(std::move(projections)) {}

  const ProjectionSet* projections() const { return projections_.get(); }

 private:
  std::shared_ptr<const ProjectionSet> projections_;
};

}  // namespace ctcsim
