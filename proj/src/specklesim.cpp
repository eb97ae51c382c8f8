#include "speckle/specklesim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace speckle::sim {

namespace detail {
void phasor_intensity(const float* sx, const float* sy, int count,
                      int width, int height, float pitch, float two_k,
                      float* out);
} // namespace detail

void LiquidSpec::validate() const {
    if (!(viscosity_pa_s > 0.0)) throw InvalidArgument("viscosity_pa_s must be > 0");
    if (!(particle_radius_m > 0.0)) throw InvalidArgument("particle_radius_m must be > 0");
    if (!(temperature_k > 0.0)) throw InvalidArgument("temperature_k must be > 0");
    if (!(opacity >= 0.0 && opacity <= 1.0)) throw InvalidArgument("opacity must be in [0, 1]");
}

void ScattererField::validate() const {
    if (x.size() != y.size()) throw InvalidArgument("scatterer x/y size mismatch");
    if (!(diffusion_coeff_m2_s > 0.0)) throw InvalidArgument("diffusion_coeff_m2_s must be > 0");
    if (!(spot_radius_m > 0.0)) throw InvalidArgument("spot_radius_m must be > 0");
    const double r2 = spot_radius_m * spot_radius_m;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] * x[i] + y[i] * y[i] > r2 * (1.0 + 1e-12)) {
            throw InvalidArgument("scatterer " + std::to_string(i) + " outside the illuminated spot");
        }
    }
}

void OpticsConfig::validate() const {
    if (!(wavelength_m > 0.0)) throw InvalidArgument("wavelength_m must be > 0");
    if (width < 16 || height < 16) throw InvalidArgument("image dimensions must be >= 16");
    if (!(pixels_per_meter > 0.0)) throw InvalidArgument("pixels_per_meter must be > 0");
    if (frames < 1) throw InvalidArgument("frames must be >= 1");
    if (!(fps > 0.0)) throw InvalidArgument("fps must be > 0");
    if (particle_count < 1) throw InvalidArgument("particle_count must be >= 1");
    if (!(spot_radius_m > 0.0)) throw InvalidArgument("spot_radius_m must be > 0");
}

double stokes_einstein(const LiquidSpec& liquid) {
    liquid.validate();
    return kBoltzmann * liquid.temperature_k /
           (6.0 * M_PI * liquid.viscosity_pa_s * liquid.particle_radius_m);
}

namespace {

// uniform position in the disk of radius r, by rejection
void draw_in_disk(RngStream& rng, double r, double& out_x, double& out_y) {
    for (;;) {
        const double u = 2.0 * rng.uniform() - 1.0;
        const double v = 2.0 * rng.uniform() - 1.0;
        if (u * u + v * v <= 1.0) {
            out_x = u * r;
            out_y = v * r;
            return;
        }
    }
}

ScattererField make_field_with_stream(const LiquidSpec& liquid, const OpticsConfig& optics,
                                      std::uint64_t stream_id) {
    ScattererField field;
    field.diffusion_coeff_m2_s = stokes_einstein(liquid);
    field.spot_radius_m = optics.spot_radius_m;
    field.x.resize(optics.particle_count);
    field.y.resize(optics.particle_count);
    RngStream rng(optics.seed, stream_id);
    for (int i = 0; i < optics.particle_count; ++i) {
        draw_in_disk(rng, field.spot_radius_m, field.x[i], field.y[i]);
    }
    return field;
}

} // namespace

ScattererField make_field(const LiquidSpec& liquid, const OpticsConfig& optics) {
    optics.validate();
    return make_field_with_stream(liquid, optics, stream_tag::kInitialPositions);
}

void step_brownian(ScattererField& field, double dt, RngStream& rng) {
    if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
    const double sigma = std::sqrt(2.0 * field.diffusion_coeff_m2_s * dt);
    const double r2 = field.spot_radius_m * field.spot_radius_m;
    for (std::size_t i = 0; i < field.size(); ++i) {
        field.x[i] += sigma * rng.gaussian();
        field.y[i] += sigma * rng.gaussian();
        if (field.x[i] * field.x[i] + field.y[i] * field.y[i] > r2) {
            draw_in_disk(rng, field.spot_radius_m, field.x[i], field.y[i]);
        }
    }
}

std::vector<float> render_intensity(const ScattererField& field, const OpticsConfig& optics) {
    const int n = static_cast<int>(field.size());
    std::vector<float> sx(n), sy(n);
    for (int i = 0; i < n; ++i) {
        sx[i] = static_cast<float>(field.x[i]);
        sy[i] = static_cast<float>(field.y[i]);
    }
    std::vector<float> out(static_cast<std::size_t>(optics.width) * optics.height);
    const float pitch = static_cast<float>(1.0 / optics.pixels_per_meter);
    // factor 2: round-trip path length from transmitter plane and back
    const float two_k = static_cast<float>(2.0 * 2.0 * M_PI / optics.wavelength_m);
    detail::phasor_intensity(sx.data(), sy.data(), n, optics.width, optics.height, pitch, two_k, out.data());
    return out;
}

namespace {

// normalize so the 99.5th-percentile intensity maps to 255, clamp above
Frame quantize(const std::vector<float>& intensity, int width, int height) {
    Frame frame(width, height);
    std::vector<float> sorted(intensity);
    const std::size_t idx = static_cast<std::size_t>(std::llround(0.995 * (sorted.size() - 1)));
    std::nth_element(sorted.begin(), sorted.begin() + idx, sorted.end());
    const float p = sorted[idx];
    if (!(p > 0.0f)) return frame; // all-dark input
    const float scale = 255.0f / p;
    for (std::size_t i = 0; i < intensity.size(); ++i) {
        const float v = intensity[i] * scale;
        frame.pixels[i] = static_cast<std::uint8_t>(v >= 255.0f ? 255 : static_cast<int>(v + 0.5f));
    }
    return frame;
}

} // namespace

Frame render_frame(const ScattererField& field, const OpticsConfig& optics, const LiquidSpec& liquid,
                   const std::vector<float>* static_intensity) {
    optics.validate();
    liquid.validate();
    std::vector<float> intensity = render_intensity(field, optics);
    if (liquid.opacity < 1.0 && static_intensity != nullptr) {
        const float o = static_cast<float>(liquid.opacity);
        for (std::size_t i = 0; i < intensity.size(); ++i) {
            intensity[i] = o * intensity[i] + (1.0f - o) * (*static_intensity)[i];
        }
    }
    return quantize(intensity, optics.width, optics.height);
}

FrameSequence simulate(const LiquidSpec& liquid, const OpticsConfig& optics) {
    liquid.validate();
    optics.validate();

    std::vector<float> static_intensity;
    const std::vector<float>* static_ptr = nullptr;
    if (liquid.opacity < 1.0) {
        // one fixed substrate speckle with its own stream, never stepped
        ScattererField substrate = make_field_with_stream(liquid, optics, stream_tag::kStaticSubstrate);
        static_intensity = render_intensity(substrate, optics);
        static_ptr = &static_intensity;
    }

    ScattererField field = make_field(liquid, optics);
    const double dt = 1.0 / optics.fps;

    FrameSequence seq;
    seq.meta.fps = optics.fps;
    seq.meta.shutter_s = 1.0 / optics.fps;
    seq.meta.width = optics.width;
    seq.meta.height = optics.height;
    seq.meta.channel = Channel::gray;
    seq.frames.reserve(optics.frames);
    for (int i = 0; i < optics.frames; ++i) {
        if (i > 0) {
            RngStream rng(optics.seed, stream_tag::kBrownianStepBase + static_cast<std::uint64_t>(i));
            step_brownian(field, dt, rng);
        }
        seq.frames.push_back(render_frame(field, optics, liquid, static_ptr));
    }
    return seq;
}

} // namespace speckle::sim
