#pragma once

#include <stdexcept>
#include <string>

namespace nvpol {

// Invalid parameters, malformed configs, broken call contracts.
// The CLI maps this family to exit code 2.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A bath spin whose effective field vanishes or nearly vanishes
// (omega + Azz ~ 0 with negligible transverse coupling) makes the
// per-spin amplitude ill defined or useless for estimation.
// Warning by default, exit code 3 under --strict.
class DegenerateSpinError : public std::runtime_error {
public:
  explicit DegenerateSpinError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem and serialization failures. Exit code 4.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requests beyond hard implementation limits (e.g. dense bath size).
class ResourceError : public std::runtime_error {
public:
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nvpol
