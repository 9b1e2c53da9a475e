#ifndef MSS_ERROR_HPP_
#define MSS_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mss {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the byte offset (or line number for text
/// formats) where decoding stopped.
class ParseError : public Error {
 public:
  enum class Kind { MalformedHeader, TruncatedPayload, UnsupportedMagic, BadValue };

  ParseError(Kind kind, std::size_t offset, const std::string& what)
      : Error(what + " (at offset " + std::to_string(offset) + ")"), kind_(kind), offset_(offset) {}

  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// A model was asked to score a pyramid built with a different configuration.
class FingerprintMismatch : public Error {
 public:
  explicit FingerprintMismatch(std::vector<std::string> fields);

  const std::vector<std::string>& fields() const { return fields_; }

 private:
  std::vector<std::string> fields_;
};

inline FingerprintMismatch::FingerprintMismatch(std::vector<std::string> fields)
    : Error([&] {
        std::string msg = "fingerprint mismatch:";
        for (const auto& f : fields) msg += " " + f + ";";
        return msg;
      }()),
      fields_(std::move(fields)) {}

}  // namespace mss

#endif  // MSS_ERROR_HPP_
