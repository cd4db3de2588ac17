#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace centerkit {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kIo = 3,
  kFormat = 4,
  kReference = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Malformed input text. `byte_offset` is where the parser gave up, or
/// npos when the error is structural rather than lexical.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset = npos)
      : Error(ExitCode::kParse, what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t byte_offset_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ExitCode::kIo, what) {}
};

// Bad magic, version or size in a binary raster.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(ExitCode::kFormat, what) {}
};

/// An id that does not resolve (dangling image_id / category_id).
class ReferenceError : public Error {
 public:
  ReferenceError(const std::string& what, std::vector<std::int64_t> ids)
      : Error(ExitCode::kReference, what), ids_(std::move(ids)) {}
  const std::vector<std::int64_t>& ids() const noexcept { return ids_; }

 private:
  std::vector<std::int64_t> ids_;
};

}  // namespace centerkit
