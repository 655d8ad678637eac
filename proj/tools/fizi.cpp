// fizi: gesture-steering command line.
//
//   fizi run --source dir:PATH|raw:PATH --layout FILE [--bg FILE] [--sink stdout|tcp:H:P]
//            [--serve H:P] [--fps N] [--debug-dump] [--config FILE]
//   fizi learn-bg --source ... --frames N --margin M --out FILE
//   fizi mask --in FRAME.ppm --bg FILE --out MASK.pgm [--config FILE]
//   fizi synth --out DIR     (writes the bundled sample sequence)

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fizi/background.hpp"
#include "fizi/pnm.hpp"
#include "fizi/runtime/run.hpp"
#include "fizi/synthetic.hpp"

namespace fs = std::filesystem;
using namespace fizi;
using namespace fizi::runtime;

namespace {

int write_samples(const fs::path& dir) {
    namespace seq = synthetic::drive_sequence;
    fs::create_directories(dir / "frames");
    fs::create_directories(dir / "background_frames");
    for (int i = 0; i < seq::kFrames; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%03d.ppm", i);
        pnm::write_ppm(seq::frame(i), dir / "frames" / name);
    }
    std::vector<FrameRGB> bg_frames;
    for (int i = 0; i < kDefaultLearnFrames; ++i) {
        bg_frames.push_back(seq::background_frame(i));
        char name[32];
        std::snprintf(name, sizeof name, "bg_%03d.ppm", i);
        pnm::write_ppm(bg_frames.back(), dir / "background_frames" / name);
    }
    save(learn(bg_frames, kDefaultMargin), dir / "background.fizibg");
    std::ofstream(dir / "layout.xml") << seq::layout_xml();
    std::cout << "wrote " << seq::kFrames << " frames, " << kDefaultLearnFrames
              << " background frames, background.fizibg and layout.xml to " << dir.string() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contactless gesture steering: hand segmentation, cursor tracking, virtual wheel."};
    app.require_subcommand(1);

    RuntimeConfig cfg;
    std::string source_text;
    std::string bg_path;
    std::string config_path;
    double fps = 30.0;

    auto* run_cmd = app.add_subcommand("run", "Replay a frame source through the pipeline and emit commands");
    run_cmd->add_option("--source", source_text, "dir:PATH or raw:PATH (raw:- reads stdin)")->required();
    run_cmd->add_option("--layout", cfg.layout_path, "Interface layout XML")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--bg", bg_path, "Background model (learned from the first frames when omitted)")
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--sink", cfg.sink, "stdout or tcp:HOST:PORT")->capture_default_str();
    run_cmd->add_option("--serve", cfg.serve, "Serve the UI and /ws on HOST:PORT");
    run_cmd->add_option("--ui-assets", cfg.ui_assets, "Static UI directory")->capture_default_str();
    run_cmd->add_option("--fps", fps, "Replay rate cap")->capture_default_str()->check(CLI::PositiveNumber);
    run_cmd->add_flag("--debug-dump", cfg.debug_dump, "Write per-stage masks as PGM");
    run_cmd->add_option("--debug-dir", cfg.debug_dir, "Directory for --debug-dump")->capture_default_str();
    run_cmd->add_option("--workers", cfg.workers, "Worker threads (0 = all cores)")->capture_default_str();
    run_cmd->add_option("--config", config_path, "Runtime config XML")->check(CLI::ExistingFile);
    run_cmd->add_flag("--loop", cfg.loop, "Rewind the source when it ends");

    int learn_frames = kDefaultLearnFrames;
    int margin = kDefaultMargin;
    std::string out_path;
    auto* learn_cmd = app.add_subcommand("learn-bg", "Learn a background model from user-free frames");
    learn_cmd->add_option("--source", source_text, "dir:PATH or raw:PATH")->required();
    learn_cmd->add_option("--frames", learn_frames, "Frames to learn from")->capture_default_str();
    learn_cmd->add_option("--margin", margin, "Per-channel envelope widening")->capture_default_str();
    learn_cmd->add_option("--out", out_path, "Model file to write")->required();
    learn_cmd->add_option("--fps", fps, "Read rate cap")->capture_default_str()->check(CLI::PositiveNumber);

    std::string in_path;
    auto* mask_cmd = app.add_subcommand("mask", "Segment a single frame");
    mask_cmd->add_option("--in", in_path, "Input PPM")->required()->check(CLI::ExistingFile);
    mask_cmd->add_option("--bg", bg_path, "Background model")->required()->check(CLI::ExistingFile);
    mask_cmd->add_option("--out", out_path, "Output PGM")->required();
    mask_cmd->add_option("--config", config_path, "Runtime config XML")->check(CLI::ExistingFile);

    auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic sample sequence");
    synth_cmd->add_option("--out", out_path, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!config_path.empty()) cfg.params = load_runtime_config(config_path);
        if (*run_cmd) {
            cfg.source = parse_source_spec(source_text, fps);
            if (!bg_path.empty()) cfg.background_path = bg_path;
            return run(cfg, std::cout, std::cerr);
        }
        if (*learn_cmd) return learn_background_cli(parse_source_spec(source_text, fps), learn_frames, margin, out_path,
                                                    std::cout, std::cerr);
        if (*mask_cmd) return mask_cli(in_path, bg_path, out_path, cfg.params, std::cerr);
        if (*synth_cmd) return write_samples(out_path);
    } catch (const fizi::Error& e) {
        std::cerr << "fizi: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
