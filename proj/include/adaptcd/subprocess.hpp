#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace adaptcd {

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
};

// Runs argv[0] (PATH lookup) with the given arguments, waiting at most `timeout`.
// A process still running at the deadline is killed. stdout/stderr are inherited.
ProcessResult run_process(const std::vector<std::string>& argv, std::chrono::milliseconds timeout);

std::vector<std::string> split_command(const std::string& command);

// Self-deleting scratch directory.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace adaptcd
