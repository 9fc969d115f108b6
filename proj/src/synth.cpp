#include "irisdeid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace irisdeid {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Portable draws on top of mt19937_64; the std distributions are not
// bit-reproducible across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        has_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

double wrap_angle(double d) {
    d = std::fmod(d, kTwoPi);
    if (d > std::numbers::pi) d -= kTwoPi;
    if (d < -std::numbers::pi) d += kTwoPi;
    return d;
}

struct Wave {
    int cycles;
    double radial_slope;
    double phase;
    double amp;
};

struct RadialWave {
    double freq;
    double phase;
    double amp;
};

struct Blob {
    double rho;
    double psi;
    double s_rho;
    double s_psi;
    double amp;
};

class Texture {
public:
    Texture(TextureKind kind, std::uint64_t seed) : kind_(kind) {
        Rng rng(seed);
        switch (kind) {
            case TextureKind::Bands:
                for (int i = 0; i < 14; ++i) {
                    waves_.push_back({rng.uniform_int(5, 28), rng.uniform(-7.0, 7.0), rng.uniform(0.0, kTwoPi),
                                      rng.uniform(0.3, 1.0)});
                }
                for (int i = 0; i < 3; ++i) {
                    radial_.push_back({rng.uniform(1.0, 4.0), rng.uniform(0.0, kTwoPi), rng.uniform(0.2, 0.5)});
                }
                break;
            case TextureKind::NoiseBlobs:
                for (int i = 0; i < 180; ++i) {
                    blobs_.push_back({rng.uniform(-0.1, 1.1), rng.uniform(0.0, kTwoPi), rng.uniform(0.05, 0.14),
                                      rng.uniform(0.05, 0.16), (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.5, 1.0)});
                }
                break;
            case TextureKind::SmoothGradient:
                phase_ = rng.uniform(0.0, kTwoPi);
                break;
        }
        double norm = 0.0;
        for (const auto& w : waves_) norm += w.amp * w.amp;
        for (const auto& w : radial_) norm += w.amp * w.amp;
        wave_scale_ = norm > 0.0 ? 1.0 / std::sqrt(0.5 * norm) : 0.0;
    }

    /// Roughly zero-mean, unit-spread texture value.
    double operator()(double rho, double psi) const {
        switch (kind_) {
            case TextureKind::Bands: {
                double v = 0.0;
                for (const auto& w : waves_) v += w.amp * std::cos(w.cycles * psi + w.radial_slope * rho + w.phase);
                for (const auto& w : radial_) v += w.amp * std::cos(kTwoPi * w.freq * rho + w.phase);
                return 0.45 * v * wave_scale_;
            }
            case TextureKind::NoiseBlobs: {
                double v = 0.0;
                for (const auto& b : blobs_) {
                    const double dr = (rho - b.rho) / b.s_rho;
                    const double dp = wrap_angle(psi - b.psi) / b.s_psi;
                    const double e = 0.5 * (dr * dr + dp * dp);
                    if (e < 12.0) v += b.amp * std::exp(-e);
                }
                return 0.45 * v;
            }
            case TextureKind::SmoothGradient:
                return 0.5 * std::cos(psi - phase_) + 0.6 * (rho - 0.5);
        }
        return 0.0;
    }

private:
    TextureKind kind_;
    std::vector<Wave> waves_;
    std::vector<RadialWave> radial_;
    std::vector<Blob> blobs_;
    double phase_ = 0.0;
    double wave_scale_ = 0.0;
};

std::uint8_t to_count(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

double half_height(const Ellipse& e) {
    const double s = std::sin(e.theta);
    const double c = std::cos(e.theta);
    return std::sqrt(e.a * e.a * s * s + e.b * e.b * c * c);
}

double half_width(const Ellipse& e) {
    const double s = std::sin(e.theta);
    const double c = std::cos(e.theta);
    return std::sqrt(e.a * e.a * c * c + e.b * e.b * s * s);
}

void validate(const SynthEyeSpec& spec, const Ellipse& pupil) {
    if (spec.width <= 0 || spec.height <= 0) throw Error(ErrorCode::InvalidSpec, "image size must be positive");
    if (!(spec.occlusion >= 0.0 && spec.occlusion <= 0.5)) {
        throw Error(ErrorCode::InvalidSpec, "occlusion must lie in [0, 0.5]");
    }
    if (!(pupil.a > 0.0 && pupil.b > 0.0 && spec.iris.a > 0.0 && spec.iris.b > 0.0)) {
        throw Error(ErrorCode::InvalidSpec, "ellipse axes must be positive");
    }
    for (int i = 0; i < 256; ++i) {
        const double t = kTwoPi * i / 256;
        const double c = std::cos(pupil.theta);
        const double s = std::sin(pupil.theta);
        const double x = pupil.h + pupil.a * std::cos(t) * c - pupil.b * std::sin(t) * s;
        const double y = pupil.k + pupil.a * std::cos(t) * s + pupil.b * std::sin(t) * c;
        if (spec.iris.implicit(x, y) >= 1.0) throw Error(ErrorCode::InvalidSpec, "pupil is not inside the iris");
    }
    const double hw = half_width(spec.iris);
    const double hh = half_height(spec.iris);
    if (spec.iris.h - hw < 1.0 || spec.iris.h + hw > spec.width - 2.0 || spec.iris.k - hh < 1.0 ||
        spec.iris.k + hh > spec.height - 2.0) {
        throw Error(ErrorCode::InvalidSpec, "iris is not inside the frame");
    }
    if (spec.glint_radius < 0) throw Error(ErrorCode::InvalidSpec, "glint radius must be >= 0");
}

}  // namespace

std::string to_string(TextureKind kind) {
    switch (kind) {
        case TextureKind::Bands: return "bands";
        case TextureKind::NoiseBlobs: return "noise-blobs";
        case TextureKind::SmoothGradient: return "smooth-gradient";
    }
    return "unknown";
}

Ellipse effective_pupil(const SynthEyeSpec& spec) {
    Ellipse p = spec.pupil;
    p.a *= spec.pupil_dilation;
    p.b *= spec.pupil_dilation;
    return p;
}

SynthEye synth_eye(const SynthEyeSpec& spec) {
    const Ellipse pupil = effective_pupil(spec);
    validate(spec, pupil);
    const Ellipse& iris = spec.iris;

    // Eye opening: axis-aligned, wide enough to contain the iris at any rotation.
    Ellipse opening{iris.h, iris.k, iris.a * 2.4, iris.a * 1.25, 0.0};

    const Texture texture(spec.texture, spec.texture_seed);
    Rng grain(spec.texture_seed ^ 0x9e3779b97f4a7c15ULL);

    SynthEye eye{GrayImage(spec.width, spec.height), SegMask(spec.width, spec.height)};
    const double eyelid_y = iris.k - half_height(iris) + spec.occlusion * 2.0 * half_height(iris);

    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const double g = grain.uniform(-1.0, 1.0);
            Label label = Label::Background;
            double v = 0.0;
            if (pupil.implicit(x, y) <= 1.0) {
                label = Label::Pupil;
                v = 10.0 + 6.0 * g;
            } else if (iris.implicit(x, y) <= 1.0) {
                label = Label::Iris;
                const double dx = x - pupil.h;
                const double dy = y - pupil.k;
                double psi = std::atan2(dy, dx);
                if (psi < 0.0) psi += kTwoPi;
                const double pe = ray_exit_distance(pupil, pupil.center(), psi);
                const double ie = ray_exit_distance(iris, pupil.center(), psi);
                const double rho = std::clamp((std::hypot(dx, dy) - pe) / (ie - pe), 0.0, 1.0);
                v = 100.0 + 40.0 * texture(rho, psi - spec.texture_rotation) + 2.0 * g;
                v = std::clamp(v, 55.0, 150.0);
            } else if (opening.implicit(x, y) <= 1.0) {
                label = Label::Sclera;
                v = 200.0 + 8.0 * std::cos(0.02 * x) + 4.0 * g;
            } else {
                v = 120.0 + 15.0 * (static_cast<double>(y) / spec.height) + 4.0 * g;
            }
            if (label != Label::Background && y < eyelid_y) {
                label = Label::Sclera;
                v = 195.0 + 5.0 * g;
            }
            eye.mask.at(x, y) = label;
            eye.image.at(x, y) = to_count(v);
        }
    }

    if (spec.noise_sigma > 0.0) {
        Rng noise(spec.noise_seed);
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                eye.image.at(x, y) = to_count(eye.image.at(x, y) + spec.noise_sigma * noise.normal());
            }
        }
    }
    // Keep everything else strictly below the brightest glint level.
    for (auto& v : eye.image.data()) v = std::min<std::uint8_t>(v, 240);

    const int r = spec.glint_radius;
    for (const auto& c : spec.glints) {
        const int cx = static_cast<int>(std::lround(c.x));
        const int cy = static_cast<int>(std::lround(c.y));
        for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                if (dx * dx + dy * dy > r * r || !eye.image.contains(cx + dx, cy + dy)) continue;
                eye.image.at(cx + dx, cy + dy) = 255;
            }
        }
    }
    return eye;
}

std::vector<SynthEyeSpec> default_corpus(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SynthEyeSpec> out;
    for (int i = 0; i < count; ++i) {
        SynthEyeSpec s;
        const double ia = rng.uniform(52.0, 60.0);
        s.iris = {160.0 + rng.uniform(-12.0, 12.0), 120.0 + rng.uniform(-8.0, 8.0), ia, ia * rng.uniform(0.88, 0.98),
                  rng.uniform(-0.5, 0.5)};
        const double pa = rng.uniform(18.0, 21.0);
        s.pupil = {s.iris.h + rng.uniform(-3.0, 3.0), s.iris.k + rng.uniform(-3.0, 3.0), pa,
                   pa * rng.uniform(0.9, 1.0), rng.uniform(-0.5, 0.5)};
        s.pupil_dilation = rng.uniform(0.85, 1.3);
        s.texture = (i % 2 == 0) ? TextureKind::NoiseBlobs : TextureKind::Bands;
        s.texture_seed = rng.next();
        s.occlusion = rng.uniform(0.0, 0.2);
        const Ellipse p = effective_pupil(s);
        // One glint inside the pupil, one on the lower iris.
        s.glints.push_back({p.h + 0.4 * p.b, p.k + 0.3 * p.b});
        const double phi = rng.uniform(0.25, 0.75) * std::numbers::pi;
        const double pe = ray_exit_distance(p, p.center(), phi);
        const double ie = ray_exit_distance(s.iris, p.center(), phi);
        const double t = pe + 0.5 * (ie - pe);
        s.glints.push_back({p.h + t * std::cos(phi), p.k + t * std::sin(phi)});
        s.noise_seed = rng.next();
        s.noise_sigma = 1.0;
        out.push_back(s);
    }
    return out;
}

SynthEyeSpec default_target(std::uint64_t seed) {
    Rng rng(seed);
    SynthEyeSpec s;
    s.iris = {158.0, 118.0, 57.0, 54.0, 0.2};
    s.pupil = {160.0, 119.0, 19.0, 18.0, 0.1};
    s.texture = TextureKind::NoiseBlobs;
    s.texture_seed = rng.next();
    s.glints = {{165.0, 124.0}, {150.0, 150.0}};
    s.noise_seed = rng.next();
    s.noise_sigma = 1.0;
    return s;
}

}  // namespace irisdeid
