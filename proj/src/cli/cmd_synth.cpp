#include <iostream>

#include "adaptcd/synth.hpp"
#include "commands.hpp"

namespace adaptcd::cli {

int cmd_synth(const SynthOptions& o) {
    synth::FixtureOptions f;
    f.kind = synth::parse_scene_kind(o.scene);
    f.seed = o.seed;
    f.pairs = o.pairs;
    f.size = o.size == 0 ? synth::default_size(f.kind) : o.size;
    f.tile = o.tile;
    if (f.tile < 4 || f.size < f.tile) throw UsageError("--tile must be >= 4 and no larger than --size");
    const auto manifest = synth::write_fixture(f, o.out);
    std::cout << "wrote " << o.pairs << " pair(s), manifest " << manifest.string() << "\n";
    return kSuccess;
}

}  // namespace adaptcd::cli
