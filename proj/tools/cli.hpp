#pragma once

#include <iosfwd>

namespace medsec::cli {

enum ExitCode { kOk = 0, kConfigError = 1, kInvariantViolation = 2 };

/// Parses arguments and dispatches run / bench / report / fixtures.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace medsec::cli
