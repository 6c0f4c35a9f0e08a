#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fsupart::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsage = 2;
inline constexpr int kAnytime = 4;  // exact search stopped before proving optimality

// `args` excludes the program name. Files named "-" (the default for
// --system) are read from `in`; results go to `out` unless --out is given.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace fsupart::cli
