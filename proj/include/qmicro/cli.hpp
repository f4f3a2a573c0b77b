#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmicro::cli {

/// Exit codes of `qmicro`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// Entry point behind the `qmicro` binary. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Decimal rendering with 17 significant digits ('.' decimal point).
std::string format_double(double value);

}  // namespace qmicro::cli
