#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "irisdeid/geometry.hpp"
#include "irisdeid/glint.hpp"
#include "irisdeid/image.hpp"
#include "irisdeid/iriscode.hpp"
#include "irisdeid/metrics.hpp"
#include "irisdeid/texture_synthesis.hpp"

namespace irisdeid {

enum class Mode { Generated, Blended, Median };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);  // throws Error(Config)

struct PipelineConfig {
    std::filesystem::path source_dir;
    std::filesystem::path mask_dir;
    std::filesystem::path target_image;
    std::filesystem::path target_mask;
    std::filesystem::path out_dir;
    // Optional: <pred_mask_dir>/<mode>/<stem>.png segmentations of the outputs.
    std::filesystem::path pred_mask_dir;
    std::vector<Mode> modes{Mode::Generated, Mode::Blended, Mode::Median};
    int n_r = 64;
    int n_theta = 360;
    GlintParams glint;
    int ring_width = 5;
    EncodingParams encoding;
    bool emit_metrics = false;
    double trim_fraction = 0.05;
    int pupil_threshold = 40;  // dark-pupil segmentation when no predicted masks are supplied
    int threads = 0;           // 0 = hardware concurrency
    bool dump_codes = false;

    /// Throws Error(Config) on any violated invariant.
    void validate() const;
};

/// Overrides fields of `cfg` from a JSON document. Unknown keys are rejected.
void apply_config_json(PipelineConfig& cfg, const std::string& json_text);

struct FrameResult {
    std::string frame_id;
    bool ok = true;
    std::string skip_reason;  // error code name when !ok
    std::map<Mode, GrayImage> images;
    std::map<Mode, std::filesystem::path> outputs;
    std::map<Mode, double> hd;  // absent when the code could not be matched
    std::map<Mode, Point2> pupil_center;
    std::optional<Point2> gt_center;
    std::map<Mode, IoUReport> iou;
    std::optional<IrisCode> source_code;
    std::map<Mode, IrisCode> codes;

    std::string status() const { return ok ? "ok" : "skipped(" + skip_reason + ")"; }
};

/// Pupil region of an image by dark thresholding inside the iris/pupil area
/// of `roi`, with enclosed holes (glints) filled.
SegMask segment_dark_pupil(const GrayImage& img, const SegMask& roi, int threshold);

/// Ellipse-fit pupil center of a segmentation.
Point2 pupil_center(const SegMask& mask);

/// One frame through the full flow: fit, template, render, histogram match,
/// composite, glint restore, then the requested privacy modes. Geometry
/// failures mark the frame skipped rather than throwing.
FrameResult process_frame(const std::string& frame_id, const GrayImage& source, const SegMask& mask,
                          const Donor& donor, const PipelineConfig& cfg);

FrameResult process_frame(const std::string& frame_id, const GrayImage& source, const SegMask& mask,
                          const GrayImage& target, const SegMask& target_mask, const PipelineConfig& cfg);

struct ModeSummary {
    std::vector<double> hd;
    std::optional<CenterErrorReport> centers;
    std::optional<double> mse_x_trimmed;
    std::optional<double> mse_y_trimmed;
    std::optional<double> miou;
    std::array<std::optional<double>, 4> iou_per_class{};
    std::size_t n = 0;
    std::size_t skipped = 0;
};

struct DatasetReport {
    std::vector<FrameResult> frames;
    std::map<Mode, ModeSummary> summary;
    std::vector<std::string> warnings;
};

/// Processes every <source_dir>/<stem>.png with <mask_dir>/<stem>.png and
/// writes <out_dir>/<mode>/<stem>.png, report.csv and summary.json.
DatasetReport run_dataset(const PipelineConfig& cfg);

std::string format_csv(const DatasetReport& report, const PipelineConfig& cfg);
std::string format_summary_json(const DatasetReport& report, const PipelineConfig& cfg);

struct CorpusPaths {
    std::filesystem::path source_dir;
    std::filesystem::path mask_dir;
    std::filesystem::path target_image;
    std::filesystem::path target_mask;
};

/// Writes default_corpus(count) frames/masks as 0000.png, 0001.png, ... plus the
/// default donor eye under `dir`.
CorpusPaths write_synthetic_corpus(const std::filesystem::path& dir, int count);

}  // namespace irisdeid
