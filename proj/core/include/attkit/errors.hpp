#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace attkit {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad flag values, inconsistent specs, bad grids.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (CSV parse failures, invariant
/// violations in loaded observations, empty training subsets).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Numeric failure: degenerate denominators, singular systems, non-finite
/// intermediates that survived clipping.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Collects non-fatal diagnostics (ridge escalations, dropped learners,
/// zero-variance columns). Callers that pass nullptr discard them.
struct Warnings {
  std::vector<std::string> messages;

  void add(std::string msg) { messages.push_back(std::move(msg)); }
  bool empty() const { return messages.empty(); }
};

inline void warn(Warnings* sink, std::string msg) {
  if (sink) sink->add(std::move(msg));
}

}  // namespace attkit
