#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spinthermo/error.hpp"

namespace spinthermo::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitRefused = 4;

// Long-running work refused without an explicit opt-in.
class RuntimeGateError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kSchemaVersion = 1;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spinthermo::cli
