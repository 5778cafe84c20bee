#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "shf/spincore.hpp"

// Forward model of the modulated two-pulse photon echo: stretched-exponential
// (Mims) envelope times a squared nuclear-modulation factor, one factor per
// coupled nuclear spin.  Plus synthetic-trace generation and windowed,
// zero-padded spectral analysis of traces.

namespace shf {

// One coupled nuclear spin's contribution to the echo modulation.
struct Modulation {
    double delta_g_kHz;  // ground-manifold splitting
    double delta_e_kHz;  // excited-manifold splitting
    double rho;          // branching contrast in [0, 1]
};

struct EchoParams {
    double I0 = 1.0;     // echo intensity at zero delay (arbitrary units, > 0)
    double T2_us = 1.0;  // coherence lifetime (us, > 0)
    double x = 1.5;      // Mims stretching exponent (> 0)
    std::vector<Modulation> modulations;  // may be empty (bare envelope)

    void validate() const;  // throws InvalidInput on any violated bound
};

struct EchoTrace {
    std::vector<double> t12_us;     // pulse separations, ascending
    std::vector<double> intensity;  // >= 0, same length
    double noise_sigma = 0.0;       // additive Gaussian sigma used (0 = exact)

    void validate() const;
};

struct EchoSpectrum {
    std::vector<double> freq_kHz;   // one-sided bins, spacing 1/(padded span)
    std::vector<double> magnitude;  // DFT magnitude, >= 0
    std::string window;             // processing descriptors, for metadata
    std::string detrend;
    int zero_pad_factor = 1;
};

// Stretched-exponential amplitude model A exp(-c t^x), fitted through a
// trace's upper envelope by log-linear least squares on its local maxima.
struct StretchedEnvelope {
    double amplitude = 1.0;
    double rate = 0.0;  // c in A exp(-c t^x)
    double x = 1.5;
    double operator()(double t_us) const;
    // T2 implied by rate = 2 (2/T2)^x; +infinity when the fit came out flat.
    double T2_us() const;
};

StretchedEnvelope fit_envelope(const EchoTrace& trace, double x = 1.5);

enum class Detrend { none, envelope_normalize };
enum class Window { rectangular, hann };

struct SpectralPeak {
    double freq_kHz;
    double magnitude;
    std::size_t bin;
};

// Nuclear-modulation factor at delay t12: product over spins of
// 1 - (rho/2)[1 - cos(2 pi delta_g t)][1 - cos(2 pi delta_e t)].
// Each factor lies in [1 - 2 rho, 1]; the echo squares the product.
double modulation_factor(double t12_us, const std::vector<Modulation>& mods);

// I(t12) = I0 exp[-2 (2 t12 / T2)^x] * modulation_factor(t12)^2.
double echo_intensity(double t12_us, const EchoParams& params);

// Evaluate the forward model on a grid and add seeded Gaussian noise
// (clipped at zero).  Same seed, same grid -> identical trace.
EchoTrace simulate_trace(const std::vector<double>& t12_us,
                         const EchoParams& params, double noise_sigma,
                         std::uint64_t seed);

// Magnitude spectrum of a uniformly sampled trace.  Default pipeline:
// divide out a stretched-exponential fitted to the upper envelope, subtract
// the mean, Hann window, zero-pad 4x (rounded up to a power of two).
// The DC bin is reported but excluded by dominant_peaks().
EchoSpectrum spectrum(const EchoTrace& trace,
                      Detrend detrend = Detrend::envelope_normalize,
                      Window window = Window::hann, int zero_pad_factor = 4);

// Local maxima of the magnitude spectrum, DC excluded, strongest first.
// min_freq_kHz additionally masks the region next to DC where residual
// envelope content lives.
std::vector<SpectralPeak> dominant_peaks(const EchoSpectrum& spec,
                                         std::size_t max_count,
                                         double min_freq_kHz = 0.0);

}  // namespace shf
