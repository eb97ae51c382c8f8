#pragma once

#include <cstdint>
#include <vector>

#include "speckle/frame.hpp"
#include "speckle/rng.hpp"

namespace speckle::sim {

inline constexpr double kBoltzmann = 1.380649e-23; // J/K, exact

// Liquid under test. Opacity is the fraction of incident light scattered
// by the liquid itself; the remainder scatters from a static substrate
// speckle underneath (translucent liquids on a slide).
struct LiquidSpec {
    double viscosity_pa_s = 1.0e-3;
    double particle_radius_m = 1.0e-6;
    double temperature_k = 293.15;
    double opacity = 1.0;

    void validate() const;
};

// Scatterers inside the illuminated spot, positions in meters relative to
// the spot center.
struct ScattererField {
    std::vector<double> x;
    std::vector<double> y;
    double diffusion_coeff_m2_s = 0.0;
    double spot_radius_m = 0.5e-3; // ~1 mm beam diameter

    std::size_t size() const { return x.size(); }
    void validate() const;
};

struct OpticsConfig {
    double wavelength_m = 800e-9;
    int width = 256;
    int height = 256;
    double pixels_per_meter = 2.0e6;
    int frames = 1;
    double fps = 30.0;
    std::uint64_t seed = 0;
    int particle_count = 500;
    double spot_radius_m = 0.5e-3;

    void validate() const;
};

// D = kB*T / (6*pi*eta*r). Throws InvalidArgument on non-positive inputs.
double stokes_einstein(const LiquidSpec& liquid);

// Scatterers placed uniformly at random inside the spot, from the
// (seed, initial-positions) stream.
ScattererField make_field(const LiquidSpec& liquid, const OpticsConfig& optics);

// One Brownian step: independent Gaussian displacement per axis with
// variance 2*D*dt. Particles that leave the spot are re-injected uniformly
// at random inside it. Throws InvalidArgument if dt <= 0.
void step_brownian(ScattererField& field, double dt, RngStream& rng);

// Raw intensity |A(p)|^2 of the phasor sum over round-trip path lengths,
// before blending and quantization. Length width*height, row-major.
std::vector<float> render_intensity(const ScattererField& field, const OpticsConfig& optics);

// Quantized frame: dynamic intensity blended with the static substrate
// weighted (1 - opacity), normalized so the 99.5th-percentile intensity
// maps to 255. Pass nullptr for static_intensity when opacity is 1.
Frame render_frame(const ScattererField& field, const OpticsConfig& optics, const LiquidSpec& liquid,
                   const std::vector<float>* static_intensity = nullptr);

// frames[i] is the field after i Brownian steps of dt = 1/fps.
FrameSequence simulate(const LiquidSpec& liquid, const OpticsConfig& optics);

} // namespace speckle::sim
