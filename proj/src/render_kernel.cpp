// Hot inner loop of the speckle renderer, isolated so it can be compiled
// with -Ofast. Everything here is pure float arithmetic with no libm calls
// in the loop body, which lets the compiler vectorize the particle loop.

#include <cmath>
#include <cstddef>

namespace speckle::sim::detail {

namespace {

// sin(2*pi*u) for u in [-0.5, 0.5), odd polynomial, max err ~6e-8 in float
inline float sin_turns(float u) {
    const float u2 = u * u;
    return u * (6.2831852724e+00f +
                u2 * (-4.1341697038e+01f +
                      u2 * (8.1605023638e+01f +
                            u2 * (-7.6701537670e+01f +
                                  u2 * (4.2016075761e+01f +
                                        u2 * (-1.4868322749e+01f + u2 * 3.1993388407e+00f))))));
}

// cos(2*pi*u) for u in [-0.5, 0.5), even polynomial, max err ~5e-8 in float
inline float cos_turns(float u) {
    const float u2 = u * u;
    return 9.9999999989e-01f +
           u2 * (-1.9739208743e+01f +
                 u2 * (6.4939389076e+01f +
                       u2 * (-8.5456658315e+01f +
                             u2 * (6.0242131338e+01f +
                                   u2 * (-2.6404668187e+01f +
                                         u2 * (7.8001314376e+00f + u2 * -1.4531123160e+00f))))));
}

} // namespace

// out[y*width + x] = |sum_k exp(i * two_k * dist(pixel, particle k))|^2
// Pixel (x, y) sits at ((x - width/2) * pitch, (y - height/2) * pitch).
void phasor_intensity(const float* sx, const float* sy, int count,
                      int width, int height, float pitch, float two_k,
                      float* out) {
    // phase is accumulated in turns so range reduction is a float->int trunc
    const float turns_per_meter = two_k * 0.15915494309189535f; // / (2*pi)
    for (int y = 0; y < height; ++y) {
        const float py = (y - height / 2) * pitch;
        for (int x = 0; x < width; ++x) {
            const float px = (x - width / 2) * pitch;
            float re = 0.0f;
            float im = 0.0f;
            for (int k = 0; k < count; ++k) {
                const float dx = px - sx[k];
                const float dy = py - sy[k];
                const float d = std::sqrt(dx * dx + dy * dy);
                float t = turns_per_meter * d;
                t -= static_cast<float>(static_cast<int>(t)); // frac, t >= 0
                const float u = t - 0.5f;
                // exp(2*pi*i*t) = -exp(2*pi*i*u)
                re -= cos_turns(u);
                im -= sin_turns(u);
            }
            out[static_cast<std::size_t>(y) * width + x] = re * re + im * im;
        }
    }
}

} // namespace speckle::sim::detail
