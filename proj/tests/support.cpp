#include "support.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include "adaptcd/cli.hpp"
#include "adaptcd/formats.hpp"

namespace fs = std::filesystem;

namespace testing {

std::vector<std::pair<std::string, std::string>> read_tree(const fs::path& root) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) {
            out.emplace_back(fs::relative(e.path(), root).generic_string(), adaptcd::formats::read_file(e.path()));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

void write_script(const fs::path& path, const std::string& body) {
    adaptcd::formats::write_file(path, "#!/bin/sh\n" + body);
    fs::permissions(path, fs::perms::owner_all, fs::perm_options::replace);
}

CliResult run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"adaptcd"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    CliResult r;
    try {
        r.code = adaptcd::cli::main(static_cast<int>(argv.size()), argv.data());
    } catch (...) {
        std::cout.rdbuf(old_out);
        std::cerr.rdbuf(old_err);
        throw;
    }
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

}  // namespace testing
