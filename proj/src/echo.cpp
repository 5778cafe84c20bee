#include "shf/echo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

namespace shf {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Phase accumulated by a splitting given in kHz over a delay in us.
inline double phase(double delta_kHz, double t12_us) {
    return two_pi * delta_kHz * t12_us * 1e-3;
}

// In-place iterative radix-2 FFT (size must be a power of two).
void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -two_pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

double StretchedEnvelope::operator()(double t_us) const {
    return amplitude * std::exp(-rate * std::pow(t_us, x));
}

double StretchedEnvelope::T2_us() const {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 / std::pow(0.5 * rate, 1.0 / x);
}

// Log-linear least squares of log I = log A - c t^x over the upper envelope
// (local maxima plus endpoints).  Used to flatten the decay before the DFT
// and to seed T2 in fits, so robustness matters more than optimality.
StretchedEnvelope fit_envelope(const EchoTrace& trace, double x) {
    trace.validate();
    const auto& t = trace.t12_us;
    const auto& I = trace.intensity;
    const std::size_t n = t.size();

    // Maxima deep below the peak are noise (or clipped zeros), not envelope;
    // log-regressing through them would wreck the slope.
    const double floor_I =
        0.02 * *std::max_element(I.begin(), I.end());
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = (i == 0) || I[i] >= I[i - 1];
        const bool right_ok = (i + 1 == n) || I[i] >= I[i + 1];
        if (left_ok && right_ok && I[i] > floor_I) keep.push_back(i);
    }
    if (keep.size() < 3) {  // heavily clipped trace: fall back to everything
        keep.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (I[i] > 0.0) keep.push_back(i);
    }
    if (keep.size() < 2)
        throw ComputationError(
            "envelope: trace has no positive samples to fit");

    double su = 0, sy = 0, suu = 0, suy = 0;
    for (std::size_t i : keep) {
        const double u = std::pow(t[i], x);
        const double y = std::log(I[i]);
        su += u;
        sy += y;
        suu += u * u;
        suy += u * y;
    }
    const double m = static_cast<double>(keep.size());
    const double det = m * suu - su * su;
    StretchedEnvelope env;
    env.x = x;
    if (std::abs(det) < 1e-300 * std::max(1.0, suu)) {
        env.amplitude = std::exp(sy / m);  // degenerate abscissa: flat fit
        env.rate = 0.0;
        return env;
    }
    const double slope = (m * suy - su * sy) / det;
    env.amplitude = std::exp((sy - slope * su) / m);
    env.rate = -slope;
    return env;
}

void EchoParams::validate() const {
    if (!(I0 > 0.0) || !std::isfinite(I0))
        throw InvalidInput("echo: I0 must be positive and finite");
    if (!(T2_us > 0.0) || !std::isfinite(T2_us))
        throw InvalidInput("echo: T2 must be positive and finite");
    if (!(x > 0.0) || !std::isfinite(x))
        throw InvalidInput("echo: stretching exponent must be positive");
    for (const auto& m : modulations) {
        if (!std::isfinite(m.delta_g_kHz) || !std::isfinite(m.delta_e_kHz))
            throw InvalidInput("echo: modulation frequencies must be finite");
        if (!(m.rho >= 0.0 && m.rho <= 1.0))
            throw InvalidInput("echo: rho must lie in [0, 1]");
    }
}

void EchoTrace::validate() const {
    if (t12_us.size() != intensity.size())
        throw InvalidInput("trace: t12 and intensity lengths differ");
    if (t12_us.size() < 2) throw InvalidInput("trace: need at least 2 samples");
    for (std::size_t i = 0; i < t12_us.size(); ++i) {
        if (!std::isfinite(t12_us[i]) || !std::isfinite(intensity[i]))
            throw InvalidInput("trace: non-finite sample");
        if (intensity[i] < 0.0) throw InvalidInput("trace: negative intensity");
        if (i > 0 && t12_us[i] <= t12_us[i - 1])
            throw InvalidInput("trace: t12 must be strictly ascending");
    }
}

double modulation_factor(double t12_us, const std::vector<Modulation>& mods) {
    double f = 1.0;
    for (const auto& m : mods) {
        const double cg = 1.0 - std::cos(phase(m.delta_g_kHz, t12_us));
        const double ce = 1.0 - std::cos(phase(m.delta_e_kHz, t12_us));
        f *= 1.0 - 0.5 * m.rho * cg * ce;
    }
    return f;
}

double echo_intensity(double t12_us, const EchoParams& params) {
    if (t12_us < 0.0) throw InvalidInput("echo: t12 must be >= 0");
    const double envelope =
        std::exp(-2.0 * std::pow(2.0 * t12_us / params.T2_us, params.x));
    const double f = modulation_factor(t12_us, params.modulations);
    return params.I0 * envelope * f * f;
}

EchoTrace simulate_trace(const std::vector<double>& t12_us,
                         const EchoParams& params, double noise_sigma,
                         std::uint64_t seed) {
    params.validate();
    if (noise_sigma < 0.0) throw InvalidInput("echo: noise sigma must be >= 0");
    EchoTrace trace;
    trace.t12_us = t12_us;
    trace.intensity.resize(t12_us.size());
    trace.noise_sigma = noise_sigma;

    // Box-Muller on top of the engine's doubles keeps traces reproducible
    // across standard libraries (std::normal_distribution is not portable).
    std::mt19937_64 rng(seed);
    auto gaussian = [&rng]() {
        const double u1 =
            (static_cast<double>(rng() >> 11) + 1.0) / 9007199254740993.0;
        const double u2 = static_cast<double>(rng() >> 11) / 9007199254740992.0;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    };

    for (std::size_t i = 0; i < t12_us.size(); ++i) {
        double v = echo_intensity(t12_us[i], params);
        if (noise_sigma > 0.0) v += noise_sigma * gaussian();
        trace.intensity[i] = std::max(0.0, v);
    }
    trace.validate();  // also enforces the ascending-grid precondition
    return trace;
}

EchoSpectrum spectrum(const EchoTrace& trace, Detrend detrend, Window window,
                      int zero_pad_factor) {
    trace.validate();
    const std::size_t n = trace.t12_us.size();
    if (n < 8) throw InvalidInput("spectrum: need at least 8 samples");
    if (zero_pad_factor < 1)
        throw InvalidInput("spectrum: zero_pad_factor must be >= 1");

    const double dt = trace.t12_us[1] - trace.t12_us[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double step = trace.t12_us[i] - trace.t12_us[i - 1];
        if (std::abs(step - dt) > 1e-6 * dt)
            throw InvalidInput("spectrum: sampling must be uniform");
    }

    std::vector<double> v(trace.intensity);
    EchoSpectrum out;
    if (detrend == Detrend::envelope_normalize) {
        const auto env = fit_envelope(trace, 1.5);
        // Clamp the divisor where the envelope has decayed below the noise:
        // dividing by it there would amplify that noise without bound.  The
        // noise scale comes from the final decile, where the decay is done.
        const std::size_t tail = std::max<std::size_t>(8, n / 10);
        double tm = 0.0, ts = 0.0;
        for (std::size_t i = n - tail; i < n; ++i) tm += trace.intensity[i];
        tm /= static_cast<double>(tail);
        for (std::size_t i = n - tail; i < n; ++i)
            ts += (trace.intensity[i] - tm) * (trace.intensity[i] - tm);
        const double noise_scale = std::sqrt(ts / static_cast<double>(tail));
        const double env_floor = std::max(3.0 * noise_scale, 1e-12 * env.amplitude);
        for (std::size_t i = 0; i < n; ++i)
            v[i] /= std::max(env(trace.t12_us[i]), env_floor);

        // The clamp leaves a slow residual trend; remove it (and the mean)
        // with a quadratic so it cannot masquerade as a low-frequency line.
        Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
        Eigen::Vector3d b = Eigen::Vector3d::Zero();
        const double t0 = trace.t12_us.front();
        const double span = trace.t12_us.back() - t0;
        for (std::size_t i = 0; i < n; ++i) {
            const double tau = (trace.t12_us[i] - t0) / span;
            const Eigen::Vector3d basis(1.0, tau, tau * tau);
            M += basis * basis.transpose();
            b += basis * v[i];
        }
        const Eigen::Vector3d coef = M.ldlt().solve(b);
        for (std::size_t i = 0; i < n; ++i) {
            const double tau = (trace.t12_us[i] - t0) / span;
            v[i] -= coef[0] + coef[1] * tau + coef[2] * tau * tau;
        }
        out.detrend =
            "stretched-exponential divided out (x=1.5, divisor clamped at "
            "the tail noise scale), quadratic trend subtracted";
    } else {
        out.detrend = "none";
    }

    if (window == Window::hann) {
        for (std::size_t i = 0; i < n; ++i)
            v[i] *= 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(i) /
                                          static_cast<double>(n - 1)));
        out.window = "hann";
    } else {
        out.window = "rectangular";
    }

    const std::size_t n_fft =
        next_pow2(n * static_cast<std::size_t>(zero_pad_factor));
    std::vector<std::complex<double>> a(n_fft, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i] = v[i];
    fft_pow2(a);

    out.zero_pad_factor = zero_pad_factor;
    const double df_kHz = 1e3 / (static_cast<double>(n_fft) * dt);  // us -> kHz
    const std::size_t n_bins = n_fft / 2 + 1;
    out.freq_kHz.resize(n_bins);
    out.magnitude.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) {
        out.freq_kHz[k] = df_kHz * static_cast<double>(k);
        out.magnitude[k] = std::abs(a[k]);
    }
    return out;
}

std::vector<SpectralPeak> dominant_peaks(const EchoSpectrum& spec,
                                         std::size_t max_count,
                                         double min_freq_kHz) {
    std::vector<SpectralPeak> peaks;
    const auto& m = spec.magnitude;
    for (std::size_t k = 1; k + 1 < m.size(); ++k) {
        if (spec.freq_kHz[k] < min_freq_kHz) continue;
        if (m[k] > m[k - 1] && m[k] >= m[k + 1])
            peaks.push_back({spec.freq_kHz[k], m[k], k});
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const SpectralPeak& a, const SpectralPeak& b) {
                  return a.magnitude > b.magnitude;
              });
    if (peaks.size() > max_count) peaks.resize(max_count);
    return peaks;
}

}  // namespace shf
