#ifndef IDEPNN_ERRORS_HPP
#define IDEPNN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace idepnn {

// Malformed input, bad config, unresolved references. CLI exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken internal invariant (shape mismatch, numeric overflow). CLI exit code 3.
struct InternalError : std::runtime_error {
  explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace idepnn

#endif
