#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace matframe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitCertificate = 3;

inline constexpr const char* kToolName = "matframe";
inline constexpr const char* kToolVersion = "0.1.0";

/// Runs one command line (args excludes the program name). Reports go to
/// `out` as JSON, diagnostics to `err`. Returns the process exit code:
/// 0 ok, 2 input or precondition error, 3 certificate failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace matframe::cli
