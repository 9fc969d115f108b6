#include "irisdeid/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "irisdeid/png_io.hpp"
#include "irisdeid/privacy_modes.hpp"
#include "irisdeid/synth.hpp"

namespace irisdeid {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::array<Mode, 3> kAllModes{Mode::Generated, Mode::Blended, Mode::Median};

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

json number6(double v) {
    if (!std::isfinite(v)) return nullptr;
    return json::parse(fixed6(v));
}

json optional6(const std::optional<double>& v) { return v ? number6(*v) : json(nullptr); }

template <class T>
void read_key(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (std::ranges::find_if(allowed, [&](const char* a) { return key == a; }) == allowed.end()) {
            throw Error(ErrorCode::Config, "unknown key '" + key + "' in " + where);
        }
    }
}

std::optional<IrisCode> try_encode(const GrayImage& img, const SegMask& mask, const EyeEllipses& eye,
                                   const EncodingParams& params, const GlintMask& glints) {
    try {
        return encode(img, mask, eye.pupil, eye.iris, params, glints);
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::Generated: return "generated";
        case Mode::Blended: return "blended";
        case Mode::Median: return "median";
    }
    return "unknown";
}

Mode mode_from_string(const std::string& name) {
    for (Mode m : kAllModes) {
        if (to_string(m) == name) return m;
    }
    throw Error(ErrorCode::Config, "unknown mode '" + name + "' (expected generated, blended or median)");
}

void PipelineConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::Config, msg); };
    if (modes.empty()) fail("at least one mode is required");
    if (source_dir.empty() || mask_dir.empty() || out_dir.empty()) fail("source, mask and output directories are required");
    if (target_image.empty() || target_mask.empty()) fail("target image and target mask are required");
    const std::vector<fs::path> paths{source_dir, mask_dir, out_dir, target_image, target_mask};
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (std::size_t j = i + 1; j < paths.size(); ++j) {
            if (paths[i].lexically_normal() == paths[j].lexically_normal()) fail("input and output paths must be distinct");
        }
    }
    if (n_r < 2 || n_theta < 8) fail("grid needs n_r >= 2 and n_theta >= 8");
    if (glint.threshold < 1 || glint.threshold > 255) fail("glint_threshold must be in [1, 255]");
    if (glint.dilate < 0) fail("glint_dilate must be >= 0");
    if (ring_width < 0) fail("ring_width must be >= 0");
    if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) fail("trim_fraction must be in [0, 0.5)");
    if (pupil_threshold < 0 || pupil_threshold > 255) fail("pupil_threshold must be in [0, 255]");
    if (threads < 0) fail("threads must be >= 0");
    try {
        encoding.validate();
    } catch (const Error& e) {
        fail(std::string("encoding: ") + e.what());
    }
}

void apply_config_json(PipelineConfig& cfg, const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Config, std::string("invalid config JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");
    try {
        check_keys(j,
                   {"source_dir", "mask_dir", "target_image", "target_mask", "out_dir", "pred_mask_dir", "modes", "n_r",
                    "n_theta", "glint_threshold", "glint_dilate", "ring_width", "encoding", "emit_metrics",
                    "trim_fraction", "pupil_threshold", "threads", "dump_codes"},
                   "config");
        auto path_key = [&](const char* key, fs::path& out) {
            if (j.contains(key)) out = j.at(key).get<std::string>();
        };
        path_key("source_dir", cfg.source_dir);
        path_key("mask_dir", cfg.mask_dir);
        path_key("target_image", cfg.target_image);
        path_key("target_mask", cfg.target_mask);
        path_key("out_dir", cfg.out_dir);
        path_key("pred_mask_dir", cfg.pred_mask_dir);
        if (j.contains("modes")) {
            cfg.modes.clear();
            for (const auto& m : j.at("modes")) cfg.modes.push_back(mode_from_string(m.get<std::string>()));
        }
        read_key(j, "n_r", cfg.n_r);
        read_key(j, "n_theta", cfg.n_theta);
        read_key(j, "glint_threshold", cfg.glint.threshold);
        read_key(j, "glint_dilate", cfg.glint.dilate);
        read_key(j, "ring_width", cfg.ring_width);
        read_key(j, "emit_metrics", cfg.emit_metrics);
        read_key(j, "trim_fraction", cfg.trim_fraction);
        read_key(j, "pupil_threshold", cfg.pupil_threshold);
        read_key(j, "threads", cfg.threads);
        read_key(j, "dump_codes", cfg.dump_codes);
        if (j.contains("encoding")) {
            const json& e = j.at("encoding");
            check_keys(e, {"enc_n_r", "enc_n_theta", "wavelength", "sigma_over_f", "shift_range"}, "encoding");
            read_key(e, "enc_n_r", cfg.encoding.enc_n_r);
            read_key(e, "enc_n_theta", cfg.encoding.enc_n_theta);
            read_key(e, "wavelength", cfg.encoding.wavelength);
            read_key(e, "sigma_over_f", cfg.encoding.sigma_over_f);
            read_key(e, "shift_range", cfg.encoding.shift_range);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Config, std::string("config type error: ") + e.what());
    }
}

SegMask segment_dark_pupil(const GrayImage& img, const SegMask& roi, int threshold) {
    require_same_size(img, roi, "image and region mask sizes differ");
    const int w = img.width();
    const int h = img.height();
    std::vector<std::uint8_t> dark(img.size(), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Label l = roi.at(x, y);
            if ((l == Label::Pupil || l == Label::Iris) && img.at(x, y) <= threshold) {
                dark[static_cast<std::size_t>(y) * w + x] = 1;
            }
        }
    }
    // Flood the non-dark background from the border; anything unreached is a hole.
    std::vector<std::uint8_t> outside(img.size(), 0);
    std::vector<std::size_t> stack;
    auto push = [&](int x, int y) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (!dark[i] && !outside[i]) {
            outside[i] = 1;
            stack.push_back(i);
        }
    };
    for (int x = 0; x < w; ++x) {
        push(x, 0);
        push(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push(0, y);
        push(w - 1, y);
    }
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        const int x = static_cast<int>(i % w);
        const int y = static_cast<int>(i / w);
        if (x > 0) push(x - 1, y);
        if (x < w - 1) push(x + 1, y);
        if (y > 0) push(x, y - 1);
        if (y < h - 1) push(x, y + 1);
    }
    SegMask out(w, h);
    for (std::size_t i = 0; i < img.size(); ++i) {
        out.data()[i] = outside[i] ? Label::Background : Label::Pupil;
    }
    return out;
}

Point2 pupil_center(const SegMask& mask) {
    const auto pts = boundary_edge_points(mask, {Label::Pupil});
    const Ellipse e = fit_ellipse(pts);
    return e.center();
}

FrameResult process_frame(const std::string& frame_id, const GrayImage& source, const SegMask& mask,
                          const Donor& donor, const PipelineConfig& cfg) {
    FrameResult res;
    res.frame_id = frame_id;
    require_same_size(source, mask, "source frame and mask sizes differ");
    try {
        const EyeEllipses eye = fit_eye_ellipses(mask);
        const RadialProfile profile = compute_radial_profile(mask, eye.pupil, eye.iris, cfg.n_theta);
        const GlintMask glints = detect_glints(source, mask, cfg.glint);

        const UnwrappedIris tmpl = build_template(donor, profile, eye.iris, cfg.n_r, cfg.n_theta);
        IrisLayer layer = render_iris(tmpl, profile, mask, eye.pupil);
        if (layer.covered_count() > 0) layer = match_histogram(layer, source, mask, &glints);
        const GrayImage generated = restore_glints(composite(source, layer), source, glints);

        for (Mode m : cfg.modes) {
            switch (m) {
                case Mode::Generated:
                    res.images[m] = generated;
                    break;
                case Mode::Blended: {
                    const BlendParams bp{cfg.ring_width, true};
                    res.images[m] = restore_glints(blend(source, generated, mask, eye.iris, eye.pupil, bp), source, glints);
                    break;
                }
                case Mode::Median:
                    res.images[m] = restore_glints(median_iris(source, mask), source, glints);
                    break;
            }
        }

        if (cfg.emit_metrics) {
            res.gt_center = eye.pupil.center();
            res.source_code = try_encode(source, mask, eye, cfg.encoding, glints);
            for (const auto& [m, img] : res.images) {
                const SegMask seg = segment_dark_pupil(img, mask, cfg.pupil_threshold);
                try {
                    res.pupil_center[m] = pupil_center(seg);
                } catch (const Error&) {
                }
                auto code = try_encode(img, mask, eye, cfg.encoding, glints);
                if (code && res.source_code) {
                    try {
                        res.hd[m] = hamming(*res.source_code, *code, cfg.encoding.shift_range).hd;
                    } catch (const Error&) {
                    }
                }
                if (code) res.codes.emplace(m, std::move(*code));
            }
        }
    } catch (const Error& e) {
        switch (e.code()) {
            case ErrorCode::Io:
            case ErrorCode::Config:
            case ErrorCode::DimensionMismatch:
                throw;
            default:
                res = FrameResult{};
                res.frame_id = frame_id;
                res.ok = false;
                res.skip_reason = std::string(to_string(e.code()));
        }
    }
    return res;
}

FrameResult process_frame(const std::string& frame_id, const GrayImage& source, const SegMask& mask,
                          const GrayImage& target, const SegMask& target_mask, const PipelineConfig& cfg) {
    return process_frame(frame_id, source, mask, prepare_donor(target, target_mask, cfg.glint), cfg);
}

namespace {

void summarize(DatasetReport& report, const PipelineConfig& cfg) {
    for (Mode m : cfg.modes) {
        ModeSummary s;
        std::vector<Point2> pred;
        std::vector<Point2> gt;
        std::vector<double> ex;
        std::vector<double> ey;
        std::vector<double> miou;
        std::array<std::vector<double>, 4> per_class;
        for (const auto& f : report.frames) {
            if (!f.ok) {
                ++s.skipped;
                continue;
            }
            ++s.n;
            if (auto it = f.hd.find(m); it != f.hd.end()) s.hd.push_back(it->second);
            if (auto it = f.pupil_center.find(m); it != f.pupil_center.end() && f.gt_center) {
                pred.push_back(it->second);
                gt.push_back(*f.gt_center);
                ex.push_back(it->second.x - f.gt_center->x);
                ey.push_back(it->second.y - f.gt_center->y);
            }
            if (auto it = f.iou.find(m); it != f.iou.end()) {
                miou.push_back(it->second.miou);
                for (std::size_t c = 0; c < 4; ++c) {
                    if (it->second.per_class[c]) per_class[c].push_back(*it->second.per_class[c]);
                }
            }
        }
        if (!pred.empty()) {
            s.centers = center_errors(pred, gt);
            try {
                s.mse_x_trimmed = outlier_trimmed_mse(ex, cfg.trim_fraction);
                s.mse_y_trimmed = outlier_trimmed_mse(ey, cfg.trim_fraction);
            } catch (const Error&) {
            }
        }
        if (!miou.empty()) {
            s.miou = mean_std(miou).mean;
            for (std::size_t c = 0; c < 4; ++c) {
                if (!per_class[c].empty()) s.iou_per_class[c] = mean_std(per_class[c]).mean;
            }
        }
        report.summary[m] = std::move(s);
    }
}

std::vector<std::string> list_stems(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw Error(ErrorCode::Config, "source directory does not exist: " + dir.string());
    }
    std::vector<std::string> stems;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") {
            stems.push_back(entry.path().stem().string());
        }
    }
    std::ranges::sort(stems);
    return stems;
}

}  // namespace

DatasetReport run_dataset(const PipelineConfig& cfg) {
    cfg.validate();
    if (!fs::is_directory(cfg.mask_dir)) {
        throw Error(ErrorCode::Config, "mask directory does not exist: " + cfg.mask_dir.string());
    }
    const std::vector<std::string> stems = list_stems(cfg.source_dir);

    DatasetReport report;
    if (stems.empty()) {
        report.warnings.push_back("no frames found in " + cfg.source_dir.string());
    }

    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + cfg.out_dir.string() + ": " + ec.message());
    for (Mode m : cfg.modes) {
        fs::create_directories(cfg.out_dir / to_string(m), ec);
        if (ec) throw Error(ErrorCode::Io, "cannot create output directory: " + ec.message());
    }
    if (cfg.dump_codes) fs::create_directories(cfg.out_dir / "codes", ec);

    std::optional<Donor> donor;
    if (!stems.empty()) {
        const GrayImage target = read_gray_png(cfg.target_image);
        const SegMask target_mask = read_mask_png(cfg.target_mask);
        try {
            donor = prepare_donor(target, target_mask, cfg.glint);
        } catch (const Error& e) {
            throw Error(ErrorCode::Config, std::string("target eye is unusable: ") + e.what());
        }
    }

    report.frames.resize(stems.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::optional<Error> first_error;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= stems.size()) return;
            {
                std::scoped_lock lock(error_mutex);
                if (first_error) return;
            }
            try {
                const std::string& stem = stems[i];
                const GrayImage source = read_gray_png(cfg.source_dir / (stem + ".png"));
                const SegMask mask = read_mask_png(cfg.mask_dir / (stem + ".png"));
                FrameResult r = process_frame(stem, source, mask, *donor, cfg);
                for (auto& [m, img] : r.images) {
                    const fs::path out = cfg.out_dir / to_string(m) / (stem + ".png");
                    write_png(out, img);
                    r.outputs[m] = out;
                    if (!cfg.pred_mask_dir.empty()) {
                        const fs::path pred = cfg.pred_mask_dir / to_string(m) / (stem + ".png");
                        if (fs::exists(pred)) {
                            const SegMask pm = read_mask_png(pred);
                            r.iou[m] = iou(pm, mask);
                            try {
                                r.pupil_center[m] = pupil_center(pm);
                            } catch (const Error&) {
                                r.pupil_center.erase(m);
                            }
                        }
                    }
                }
                if (cfg.dump_codes) {
                    if (r.source_code) {
                        std::ofstream os(cfg.out_dir / "codes" / (stem + "_source.txt"));
                        r.source_code->write_text(os);
                    }
                    for (const auto& [m, code] : r.codes) {
                        std::ofstream os(cfg.out_dir / "codes" / (stem + "_" + to_string(m) + ".txt"));
                        code.write_text(os);
                    }
                }
                r.images.clear();
                report.frames[i] = std::move(r);
            } catch (const Error& e) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = e;
            } catch (const std::exception& e) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = Error(ErrorCode::Io, e.what());
            }
        }
    };

    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
    n_threads = std::clamp<unsigned>(n_threads, 1, static_cast<unsigned>(std::max<std::size_t>(1, stems.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    if (first_error) throw *first_error;

    summarize(report, cfg);

    const auto write_text = [](const fs::path& path, const std::string& text) {
        std::ofstream os(path, std::ios::binary);
        os << text;
        if (!os) throw Error(ErrorCode::Io, "cannot write " + path.string());
    };
    write_text(cfg.out_dir / "report.csv", format_csv(report, cfg));
    write_text(cfg.out_dir / "summary.json", format_summary_json(report, cfg));
    return report;
}

std::string format_csv(const DatasetReport& report, const PipelineConfig& cfg) {
    std::ostringstream os;
    os << "frame_id,mode,status,hd,pupil_center_x,pupil_center_y\n";
    for (const auto& f : report.frames) {
        for (Mode m : cfg.modes) {
            os << f.frame_id << ',' << to_string(m) << ',' << f.status() << ',';
            if (auto it = f.hd.find(m); it != f.hd.end()) os << fixed6(it->second);
            os << ',';
            if (auto it = f.pupil_center.find(m); it != f.pupil_center.end()) {
                os << fixed6(it->second.x) << ',' << fixed6(it->second.y);
            } else {
                os << ',';
            }
            os << '\n';
        }
    }
    return os.str();
}

std::string format_summary_json(const DatasetReport& report, const PipelineConfig& cfg) {
    json root = json::object();
    for (Mode m : cfg.modes) {
        const ModeSummary& s = report.summary.at(m);
        json j;
        if (s.hd.empty()) {
            j["hd_mean"] = nullptr;
            j["hd_std"] = nullptr;
        } else {
            const MeanStd ms = mean_std(s.hd);
            j["hd_mean"] = number6(ms.mean);
            j["hd_std"] = number6(ms.std);
        }
        j["mse_x"] = optional6(s.mse_x_trimmed);
        j["mse_y"] = optional6(s.mse_y_trimmed);
        j["r2_x"] = s.centers ? number6(s.centers->r2_x) : json(nullptr);
        j["r2_y"] = s.centers ? number6(s.centers->r2_y) : json(nullptr);
        j["n"] = s.n;
        j["skipped"] = s.skipped;
        if (s.miou) {
            j["miou"] = number6(*s.miou);
            j["miou_convention"] = "per-image mean";
            json pc = json::object();
            const char* names[4] = {"background", "sclera", "iris", "pupil"};
            for (std::size_t c = 0; c < 4; ++c) pc[names[c]] = optional6(s.iou_per_class[c]);
            j["iou_per_class"] = pc;
        }
        root[to_string(m)] = j;
    }
    return root.dump(2) + "\n";
}

CorpusPaths write_synthetic_corpus(const fs::path& dir, int count) {
    if (count < 0) throw Error(ErrorCode::Config, "corpus size must be >= 0");
    CorpusPaths p{dir / "source", dir / "masks", dir / "target.png", dir / "target_mask.png"};
    std::error_code ec;
    fs::create_directories(p.source_dir, ec);
    fs::create_directories(p.mask_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create corpus directory: " + ec.message());
    const auto specs = default_corpus(count);
    for (int i = 0; i < count; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "%04d.png", i);
        const SynthEye eye = synth_eye(specs[static_cast<std::size_t>(i)]);
        write_png(p.source_dir / name, eye.image);
        write_png(p.mask_dir / name, eye.mask);
    }
    const SynthEye target = synth_eye(default_target());
    write_png(p.target_image, target.image);
    write_png(p.target_mask, target.mask);
    return p;
}

}  // namespace irisdeid
