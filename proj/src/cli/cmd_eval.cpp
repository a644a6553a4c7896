#include <iostream>

#include "adaptcd/eval.hpp"
#include "adaptcd/formats.hpp"
#include "commands.hpp"

namespace adaptcd::cli {

namespace fs = std::filesystem;

int cmd_eval(const EvalOptions& o) {
    require_file(o.manifest, "--manifest");
    PipelineConfig config = configure(o.config, o.switches);
    eval::DatasetManifest manifest;
    try {
        manifest = eval::load_manifest(o.manifest);
        if (!manifest.prompts && !o.prompts.empty()) {
            require_file(o.prompts, "--prompts");
            manifest.prompts = o.prompts;
        }
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    const eval::DatasetReport report = eval::evaluate_dataset(manifest, config, o.threads);
    const fs::path out(o.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + out.string() + ": " + ec.message());
    const std::string table = eval::report_table(report);
    formats::write_file(out / "report.json", eval::report_json(report));
    formats::write_file(out / "report.txt", table);
    std::cout << table;

    if (report.failures == 0) return kSuccess;
    return report.failures < report.pairs.size() ? kPartial : kRuntime;
}

}  // namespace adaptcd::cli
