#pragma once
#include <stdexcept>
#include <string>

namespace genecv {

// All library errors carry the originating module in the message,
// e.g. "data: missing label column 'class'".
class Error : public std::runtime_error {
  public:
    Error(const std::string& module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(module) {}

    const std::string& module() const { return module_; }

  private:
    std::string module_;
};

[[noreturn]] inline void fail(const std::string& module, const std::string& what) {
    throw Error(module, what);
}

inline void require(bool cond, const std::string& module, const std::string& what) {
    if (!cond) fail(module, what);
}

} // namespace genecv
