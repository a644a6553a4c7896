#include <iostream>

#include <CLI11.hpp>

#include "adaptcd/log.hpp"
#include "commands.hpp"

namespace adaptcd::cli {

void add_switches(CLI::App& cmd, StageSwitches& s) {
    cmd.add_flag("--no-ara", s.no_ara, "Skip radiometric alignment");
    cmd.add_flag("--no-act", s.no_act, "Replace adaptive thresholding with the fixed percentile");
    cmd.add_flag("--no-acf", s.no_acf, "Skip confidence filtering");
    cmd.add_option("--provider", s.provider, "seg=<kind>:<param>,feat=<kind>:<param>,emb=<kind>:<param>");
}

void require_file(const std::string& path, const char* flag) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw UsageError(std::string(flag) + ": no such file '" + path + "'");
    }
}

PipelineConfig configure(const std::string& config_path, const StageSwitches& switches) {
    require_file(config_path, "--config");
    PipelineConfig c;
    try {
        c = load_config(config_path);
        if (!switches.provider.empty()) apply_provider_flag(c, switches.provider);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (switches.no_ara) c.ara_enabled = false;
    if (switches.no_act) c.act_enabled = false;
    if (switches.no_acf) c.acf_enabled = false;
    return c;
}

int main(int argc, const char* const* argv) {
    CLI::App app{"Training-free open-vocabulary change detection for bi-temporal image pairs", "adaptcd"};
    app.require_subcommand(1);

    RunOptions run_o;
    auto* run = app.add_subcommand("run", "Detect changes in one image pair");
    run->add_option("--image-a", run_o.image_a, "Earlier image (PNG)")->required();
    run->add_option("--image-b", run_o.image_b, "Later image (PNG)")->required();
    run->add_option("--config", run_o.config, "Pipeline config (JSON)")->required();
    run->add_option("--prompts", run_o.prompts, "Target/background prompt file (JSON)")->required();
    run->add_option("--out", run_o.out, "Output directory")->required();
    run->add_option("--pair-id", run_o.pair_id, "Value substituted for {pair} in file provider paths");
    run->add_flag("--dump-intermediate", run_o.dump, "Write intermediate artifacts to <out>/intermediate");
    add_switches(*run, run_o.switches);

    EvalOptions eval_o;
    auto* eval = app.add_subcommand("eval", "Score a dataset manifest");
    eval->add_option("--manifest", eval_o.manifest, "Dataset manifest (JSON)")->required();
    eval->add_option("--config", eval_o.config, "Pipeline config (JSON)")->required();
    eval->add_option("--out", eval_o.out, "Report directory")->required();
    eval->add_option("--prompts", eval_o.prompts, "Prompt file used when the manifest names none");
    eval->add_option("--threads", eval_o.threads, "Worker threads (0 = all cores)");
    add_switches(*eval, eval_o.switches);

    SynthOptions synth_o;
    auto* synth = app.add_subcommand("synth", "Generate constructed-scene fixtures");
    synth->add_option("--out", synth_o.out, "Fixture directory")->required();
    synth->add_option("--seed", synth_o.seed, "Seed of the first pair")->required();
    synth->add_option("--scene", synth_o.scene, "single | mixed | noisy")
        ->check(CLI::IsMember({"single", "mixed", "noisy"}));
    synth->add_option("--pairs", synth_o.pairs, "Number of pairs")->check(CLI::PositiveNumber);
    synth->add_option("--size", synth_o.size, "Frame size in pixels (default 256, or 512 for noisy)");
    synth->add_option("--tile", synth_o.tile, "Tile size in pixels");

    InspectOptions inspect_o;
    auto* inspect = app.add_subcommand("inspect", "Validate and summarize a .dfm, .masks.json or .emb.json file");
    inspect->add_option("path", inspect_o.path, "File to inspect")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kUsage;
    }

    log();
    try {
        if (*run) return cmd_run(run_o);
        if (*eval) return cmd_eval(eval_o);
        if (*synth) return cmd_synth(synth_o);
        if (*inspect) return cmd_inspect(inspect_o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}

}  // namespace adaptcd::cli
