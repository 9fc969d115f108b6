#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "irisdeid/pipeline.hpp"

using namespace irisdeid;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::Config, "cannot open config " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Replace the iris texture of eye-tracking frames with an uncorrelated donor iris."};

    std::string config_path;
    std::string source_dir, mask_dir, target, target_mask, out_dir, pred_mask_dir;
    std::vector<std::string> modes;
    int glint_threshold = -1;
    int threads = -1;
    bool metrics = false;
    bool dump_codes = false;
    int seed_corpus = -1;

    app.add_option("--config", config_path, "JSON config; flags override its values");
    app.add_option("--source-dir", source_dir, "directory of source frames (8-bit PNG)");
    app.add_option("--mask-dir", mask_dir, "directory of segmentation masks, same stems as the frames");
    app.add_option("--target", target, "donor eye image");
    app.add_option("--target-mask", target_mask, "donor eye segmentation mask");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--mode", modes, "generated | blended | median (repeatable)");
    app.add_option("--glint-threshold", glint_threshold, "digital count at or above which a pixel is a glint");
    app.add_option("--pred-mask-dir", pred_mask_dir, "segmentations of the outputs: <dir>/<mode>/<stem>.png");
    app.add_option("--threads", threads, "worker threads (0 = all cores)");
    app.add_flag("--metrics", metrics, "compute Hamming distances and pupil-center errors");
    app.add_flag("--dump-codes", dump_codes, "write iris codes as text under <out>/codes");
    app.add_option("--seed-corpus", seed_corpus, "generate N synthetic frames under <out>/corpus and process them");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        PipelineConfig cfg;
        if (!config_path.empty()) apply_config_json(cfg, slurp(config_path));
        if (!source_dir.empty()) cfg.source_dir = source_dir;
        if (!mask_dir.empty()) cfg.mask_dir = mask_dir;
        if (!target.empty()) cfg.target_image = target;
        if (!target_mask.empty()) cfg.target_mask = target_mask;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!pred_mask_dir.empty()) cfg.pred_mask_dir = pred_mask_dir;
        if (!modes.empty()) {
            cfg.modes.clear();
            for (const auto& m : modes) cfg.modes.push_back(mode_from_string(m));
        }
        if (glint_threshold >= 0) cfg.glint.threshold = glint_threshold;
        if (threads >= 0) cfg.threads = threads;
        if (metrics) cfg.emit_metrics = true;
        if (dump_codes) cfg.dump_codes = true;

        if (seed_corpus >= 0) {
            if (cfg.out_dir.empty()) throw Error(ErrorCode::Config, "--seed-corpus needs --out");
            const CorpusPaths corpus = write_synthetic_corpus(cfg.out_dir / "corpus", seed_corpus);
            cfg.source_dir = corpus.source_dir;
            cfg.mask_dir = corpus.mask_dir;
            if (target.empty()) cfg.target_image = corpus.target_image;
            if (target_mask.empty()) cfg.target_mask = corpus.target_mask;
        }

        const DatasetReport report = run_dataset(cfg);
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';

        std::size_t skipped = 0;
        for (const auto& f : report.frames) skipped += f.ok ? 0 : 1;
        std::cout << "processed " << report.frames.size() << " frames (" << skipped << " skipped) -> "
                  << cfg.out_dir.string() << '\n';
        for (const auto& [mode, s] : report.summary) {
            if (s.hd.empty()) continue;
            const MeanStd ms = mean_std(s.hd);
            std::cout << "  " << to_string(mode) << ": HD " << ms.mean << " +- " << ms.std << '\n';
        }
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::Config ? kExitConfig : kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
}
