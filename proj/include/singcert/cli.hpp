#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace singcert {

// Exit codes: 0 ok, 1 usage or parse error, 2 certificate refusal, 3 verification failure.
enum ExitCode { ExitOk = 0, ExitUsage = 1, ExitRefused = 2, ExitFailed = 3 };

// args excludes the program name. The JSON report goes to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Drops the timestamp field so two reports can be compared byte for byte.
std::string strip_timestamp(const std::string& report);

const char* library_version();

}  // namespace singcert
