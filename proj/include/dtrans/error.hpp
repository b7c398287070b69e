#pragma once

#include <stdexcept>
#include <string>

namespace dtrans {

// Categories map onto CLI exit codes.
enum class ErrorKind { Config = 2, Io = 3, Instability = 4, Deadlock = 5, Range = 6 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string &w) : Error(ErrorKind::Config, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string &w) : Error(ErrorKind::Io, w) {}
};
struct InstabilityError : Error {
  explicit InstabilityError(const std::string &w) : Error(ErrorKind::Instability, w) {}
};
struct DeadlockError : Error {
  explicit DeadlockError(const std::string &w) : Error(ErrorKind::Deadlock, w) {}
};
struct RangeError : Error {
  explicit RangeError(const std::string &w) : Error(ErrorKind::Range, w) {}
};

}  // namespace dtrans
