#pragma once

#include <stdexcept>
#include <string>

namespace bitext {

// Malformed input data: bad UTF-8, bad link grammar, bad TSV, ...
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments, detectable before any work is done.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem-level failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pipeline stage failed mid-run.
class StageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bitext
