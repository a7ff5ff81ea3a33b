#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace eklab {

// Parameter or argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A table or buffer would exceed the configured memory budget.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::uint64_t required_bytes)
      : std::runtime_error(what), required_bytes_(required_bytes) {}
  std::uint64_t required_bytes() const noexcept { return required_bytes_; }

 private:
  std::uint64_t required_bytes_;
};

// A hypothesis of an operation fails at a specific index.
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(const std::string& what, std::uint64_t witness)
      : std::invalid_argument(what), witness_(witness) {}
  std::uint64_t witness() const noexcept { return witness_; }

 private:
  std::uint64_t witness_;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::invalid_argument(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Cache file is malformed or does not match its recorded digest.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace eklab
