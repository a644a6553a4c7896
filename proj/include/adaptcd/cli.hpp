#pragma once

namespace adaptcd::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsage = 1,
    kRuntime = 2,
    kPartial = 3,
};

// Entry point of the adaptcd tool; returns the process exit code.
int main(int argc, const char* const* argv);

}  // namespace adaptcd::cli
