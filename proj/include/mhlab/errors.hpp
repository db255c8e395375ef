#pragma once

#include <stdexcept>
#include <string>

namespace mhlab {

// Error categories map onto CLI exit codes: config/precondition failures
// exit 2, numerical verdict failures exit 1, inconclusive results exit 3.
enum class ErrorKind { config, numeric, inconclusive };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& message) {
  return Error(ErrorKind::config, message);
}
inline Error numeric_error(const std::string& message) {
  return Error(ErrorKind::numeric, message);
}
inline Error inconclusive_error(const std::string& message) {
  return Error(ErrorKind::inconclusive, message);
}

}  // namespace mhlab
