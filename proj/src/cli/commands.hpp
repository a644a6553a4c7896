#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "adaptcd/cli.hpp"
#include "adaptcd/config.hpp"

namespace CLI {
class App;
}

namespace adaptcd::cli {

// Reported with exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StageSwitches {
    bool no_ara = false;
    bool no_act = false;
    bool no_acf = false;
    std::string provider;
};

struct RunOptions {
    std::string image_a, image_b, config, prompts, out;
    std::string pair_id;  // substituted for {pair} in file-provider paths
    StageSwitches switches;
    bool dump = false;
};

struct EvalOptions {
    std::string manifest, config, prompts, out;
    StageSwitches switches;
    std::size_t threads = 0;
};

struct SynthOptions {
    std::string out;
    std::uint64_t seed = 0;
    std::string scene = "single";
    std::size_t pairs = 1;
    std::size_t size = 0;
    std::size_t tile = 32;
};

struct InspectOptions {
    std::string path;
};

void add_switches(CLI::App& cmd, StageSwitches& s);

// Loads the config file, applies --provider and the --no-* switches. Failures are usage errors.
PipelineConfig configure(const std::string& config_path, const StageSwitches& switches);
void require_file(const std::string& path, const char* flag);

int cmd_run(const RunOptions& o);
int cmd_eval(const EvalOptions& o);
int cmd_synth(const SynthOptions& o);
int cmd_inspect(const InspectOptions& o);

}  // namespace adaptcd::cli
