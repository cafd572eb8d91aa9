#ifndef CONVKG_ERROR_HPP_
#define CONVKG_ERROR_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace convkg {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, std::string field,
             const std::string& what)
      : Error(Format(source, line, field, what)),
        source_(std::move(source)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string Format(const std::string& source, std::size_t line,
                            const std::string& field, const std::string& what) {
    std::string msg = source.empty() ? std::string("<input>") : source;
    if (line > 0) msg += ":" + std::to_string(line);
    if (!field.empty()) msg += ": field '" + field + "'";
    return msg + ": " + what;
  }

  std::string source_;
  std::size_t line_;
  std::string field_;
};

// A value violates a domain invariant. Maps to HTTP 422 in the service.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Unknown node, edge or record. Maps to HTTP 404.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

// An external client (translation, embedding, classifier) failed in a way
// that may succeed on retry.
class RetriableError : public Error {
 public:
  using Error::Error;
};

// Optimistic-concurrency failure: the edit was made against a stale version.
class ConflictError : public Error {
 public:
  ConflictError(std::uint64_t current_version, const std::string& what)
      : Error(what), current_version_(current_version) {}
  std::uint64_t current_version() const { return current_version_; }

 private:
  std::uint64_t current_version_;
};

}  // namespace convkg

#endif  // CONVKG_ERROR_HPP_
