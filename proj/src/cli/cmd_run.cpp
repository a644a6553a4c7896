#include <iostream>

#include "adaptcd/formats.hpp"
#include "adaptcd/pipeline.hpp"
#include "adaptcd/png_io.hpp"
#include "commands.hpp"

namespace adaptcd::cli {

namespace fs = std::filesystem;

int cmd_run(const RunOptions& o) {
    require_file(o.image_a, "--image-a");
    require_file(o.image_b, "--image-b");
    require_file(o.prompts, "--prompts");
    PipelineConfig config = configure(o.config, o.switches);
    try {
        config.prototypes = formats::decode_prompts_json(formats::read_file(o.prompts));
    } catch (const Error& e) {
        throw UsageError(std::string("--prompts: ") + e.what());
    }
    if (!o.pair_id.empty()) config = with_pair_id(std::move(config), o.pair_id);
    if (o.dump) config.dump_intermediate = true;
    config.output_dir = o.out;

    const Image a = read_png_rgb(o.image_a);
    const Image b = read_png_rgb(o.image_b);
    const RunArtifacts artifacts = run(a, b, config);

    const fs::path out(o.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + out.string() + ": " + ec.message());
    write_png_mask(out / "mask.png", rle_decode(artifacts.change_mask()));
    MaskSet single(artifacts.change_mask().height(), artifacts.change_mask().width());
    single.add(artifacts.change_mask(), Phase::B);
    formats::write_file(out / "mask.masks.json", formats::encode_masks_json(single));
    formats::write_file(out / "summary.json", summary_json(artifacts, config));
    dump_artifacts(artifacts, out / "intermediate", config.dump_intermediate);

    std::cout << "changed pixels: " << artifacts.change_mask().count() << " of "
              << artifacts.change_mask().height() * artifacts.change_mask().width() << "\n";
    return kSuccess;
}

}  // namespace adaptcd::cli
