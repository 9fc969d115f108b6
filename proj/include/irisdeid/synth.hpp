#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irisdeid/geometry.hpp"
#include "irisdeid/image.hpp"

namespace irisdeid {

enum class TextureKind { Bands, NoiseBlobs, SmoothGradient };

std::string to_string(TextureKind kind);

/// Procedural eye used in place of a recorded dataset. Iris texture is defined
/// in rubber-sheet coordinates, so it stretches with pupil dilation.
struct SynthEyeSpec {
    int width = 320;
    int height = 240;
    Ellipse pupil{160.0, 120.0, 20.0, 20.0, 0.0};
    Ellipse iris{160.0, 120.0, 56.0, 54.0, 0.0};
    std::uint64_t texture_seed = 1;
    TextureKind texture = TextureKind::NoiseBlobs;
    double occlusion = 0.0;        // fraction of the iris height hidden by the upper eyelid, [0, 0.5]
    std::vector<Point2> glints;    // glint centers, px
    int glint_radius = 2;
    double pupil_dilation = 1.0;   // scales both pupil semi-axes
    double texture_rotation = 0.0; // radians, rotates the iris texture about the pupil center
    double noise_sigma = 0.0;      // additive sensor noise, counts
    std::uint64_t noise_seed = 0;
};

struct SynthEye {
    GrayImage image;
    SegMask mask;
};

/// Throws InvalidSpec when the pupil is not inside the iris, the iris is not
/// inside the frame, or the occlusion fraction is out of range.
SynthEye synth_eye(const SynthEyeSpec& spec);

/// Pupil ellipse after applying pupil_dilation.
Ellipse effective_pupil(const SynthEyeSpec& spec);

/// Varied source eyes (geometry, dilation, eyelid, glints, texture) from one seed.
std::vector<SynthEyeSpec> default_corpus(int count, std::uint64_t seed = 2020);

/// Donor eye whose texture seed stream is disjoint from default_corpus.
SynthEyeSpec default_target(std::uint64_t seed = 7331);

}  // namespace irisdeid
