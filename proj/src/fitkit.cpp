#include "shf/fitkit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace shf {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int n_par = 5;  // (I0, T2, delta_g, delta_e, rho)

const char* param_names[n_par] = {"I0", "T2", "delta_g", "delta_e", "rho"};

using Vec5 = Eigen::Matrix<double, n_par, 1>;
using Mat5 = Eigen::Matrix<double, n_par, n_par>;

// Smooth reparameterization keeping the first four parameters positive
// (log) and rho inside (0, 1) (logistic).
Vec5 to_internal(const FitEstimates& p) {
    Vec5 u;
    u[0] = std::log(p.I0);
    u[1] = std::log(p.T2_us);
    u[2] = std::log(p.delta_g_kHz);
    u[3] = std::log(p.delta_e_kHz);
    const double r = std::clamp(p.rho, 1e-4, 1.0 - 1e-4);
    u[4] = std::log(r / (1.0 - r));
    return u;
}

FitEstimates to_external(const Vec5& u) {
    FitEstimates p;
    p.I0 = std::exp(u[0]);
    p.T2_us = std::exp(u[1]);
    p.delta_g_kHz = std::exp(u[2]);
    p.delta_e_kHz = std::exp(u[3]);
    p.rho = 1.0 / (1.0 + std::exp(-u[4]));
    return p;
}

// Model value and partial derivatives with respect to the external
// parameters at one delay.
struct ModelEval {
    double value;
    double d[n_par];
};

ModelEval eval_model(double t_us, const FitEstimates& p, double x) {
    const double s = 2.0 * t_us / p.T2_us;
    const double sx = std::pow(s, x);
    const double envelope = std::exp(-2.0 * sx);

    const double wg = two_pi * 1e-3 * p.delta_g_kHz;  // rad per us
    const double we = two_pi * 1e-3 * p.delta_e_kHz;
    const double cg = 1.0 - std::cos(wg * t_us);
    const double ce = 1.0 - std::cos(we * t_us);
    const double G = cg * ce;
    const double F = 1.0 - 0.5 * p.rho * G;

    ModelEval out;
    out.value = p.I0 * envelope * F * F;
    out.d[0] = envelope * F * F;                          // dI0
    out.d[1] = out.value * (2.0 * x / p.T2_us) * sx;      // dT2
    const double common = 2.0 * p.I0 * envelope * F;
    out.d[2] = common * (-0.5 * p.rho) * std::sin(wg * t_us) *
               (two_pi * 1e-3 * t_us) * ce;               // ddelta_g
    out.d[3] = common * (-0.5 * p.rho) * std::sin(we * t_us) *
               (two_pi * 1e-3 * t_us) * cg;               // ddelta_e
    out.d[4] = -p.I0 * envelope * F * G;                  // drho
    return out;
}

// d(external)/d(internal) for the chain rule.
Vec5 transform_jacobian(const FitEstimates& p) {
    Vec5 s;
    s[0] = p.I0;
    s[1] = p.T2_us;
    s[2] = p.delta_g_kHz;
    s[3] = p.delta_e_kHz;
    s[4] = p.rho * (1.0 - p.rho);
    return s;
}

double cost_of(const EchoTrace& trace, const FitEstimates& p, double x) {
    double c = 0.0;
    for (std::size_t i = 0; i < trace.t12_us.size(); ++i) {
        const double s = 2.0 * trace.t12_us[i] / p.T2_us;
        const double envelope = std::exp(-2.0 * std::pow(s, x));
        const double cg = 1.0 - std::cos(two_pi * 1e-3 * p.delta_g_kHz * trace.t12_us[i]);
        const double ce = 1.0 - std::cos(two_pi * 1e-3 * p.delta_e_kHz * trace.t12_us[i]);
        const double F = 1.0 - 0.5 * p.rho * cg * ce;
        const double r = p.I0 * envelope * F * F - trace.intensity[i];
        c += r * r;
    }
    return 0.5 * c;
}

}  // namespace

double linewidth_kHz(double T2_us) {
    if (!(T2_us > 0.0)) throw InvalidInput("linewidth: T2 must be positive");
    return 1e3 / (std::numbers::pi * T2_us);
}

FitEstimates initial_guess(const EchoTrace& trace) {
    trace.validate();
    const std::size_t n = trace.t12_us.size();
    if (n < 16) throw InvalidInput("initial_guess: need at least 16 samples");

    const double I_max = *std::max_element(trace.intensity.begin(), trace.intensity.end());
    const double I_min = *std::min_element(trace.intensity.begin(), trace.intensity.end());
    if (I_max <= 0.0 || I_max - I_min <= 1e-9 * I_max)
        throw NoSignal("initial_guess: trace is flat, nothing to fit");

    FitEstimates guess;

    const auto env = fit_envelope(trace, 1.5);
    guess.I0 = env.amplitude;
    const double span = trace.t12_us.back() - trace.t12_us.front();
    guess.T2_us = std::isfinite(env.T2_us())
                      ? std::clamp(env.T2_us(), 1e-3 * span, 100.0 * span)
                      : 10.0 * span;

    // Deltas from the two strongest spectral lines, searched above the band
    // where residual envelope content lives (a few homogeneous linewidths).
    // A weak runner-up is treated as a harmonic of a single line rather
    // than a second line.
    const auto spec = spectrum(trace);
    const double guard_kHz =
        std::isfinite(guess.T2_us) ? std::max(5.0, 3.0 * linewidth_kHz(guess.T2_us))
                                   : 5.0;
    const auto peaks = dominant_peaks(spec, 2, guard_kHz);
    if (peaks.empty()) {
        const double f_nyquist =
            0.5e3 / (trace.t12_us[1] - trace.t12_us[0]);  // kHz
        guess.delta_g_kHz = guess.delta_e_kHz = 0.25 * f_nyquist;
    } else if (peaks.size() == 1 ||
               peaks[1].magnitude < 0.35 * peaks[0].magnitude) {
        guess.delta_g_kHz = guess.delta_e_kHz = peaks[0].freq_kHz;
    } else {
        guess.delta_g_kHz = std::max(peaks[0].freq_kHz, peaks[1].freq_kHz);
        guess.delta_e_kHz = std::min(peaks[0].freq_kHz, peaks[1].freq_kHz);
    }
    guess.delta_g_kHz = std::max(guess.delta_g_kHz, 1e-3);
    guess.delta_e_kHz = std::max(guess.delta_e_kHz, 1e-3);

    // Profile rho on a coarse grid with the amplitude solved in closed form;
    // modulation depth alone cannot separate rho > 1/2 from rho = 1/2.
    double best_cost = std::numeric_limits<double>::infinity();
    double best_rho = 0.0, best_I0 = guess.I0;
    FitEstimates probe = guess;
    probe.I0 = 1.0;
    for (int k = 0; k <= 20; ++k) {
        probe.rho = 0.05 * k;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto m = eval_model(trace.t12_us[i], probe, 1.5);
            num += m.value * trace.intensity[i];
            den += m.value * m.value;
        }
        const double amp = den > 0.0 ? std::max(num / den, 1e-12) : guess.I0;
        FitEstimates scaled = probe;
        scaled.I0 = amp;
        const double c = cost_of(trace, scaled, 1.5);
        if (c < best_cost) {
            best_cost = c;
            best_rho = probe.rho;
            best_I0 = amp;
        }
    }
    guess.rho = best_rho;
    guess.I0 = best_I0;
    return guess;
}

FitResult fit_echo(const EchoTrace& trace, const FitConfig& config) {
    trace.validate();
    if (!(config.tolerance > 0.0))
        throw InvalidInput("fit: tolerance must be positive");
    if (config.max_iterations < 1)
        throw InvalidInput("fit: max_iterations must be >= 1");
    if (!(config.x_fixed > 0.0))
        throw InvalidInput("fit: stretching exponent must be positive");
    const std::size_t n = trace.t12_us.size();
    if (n < 16) throw InvalidInput("fit: need at least 16 samples");

    FitEstimates start = config.initial ? *config.initial : initial_guess(trace);
    if (!(start.I0 > 0.0) || !(start.T2_us > 0.0) ||
        !(start.delta_g_kHz > 0.0) || !(start.delta_e_kHz > 0.0) ||
        !(start.rho >= 0.0 && start.rho <= 1.0))
        throw InvalidInput("fit: initial estimates violate parameter bounds");

    const double x = config.x_fixed;
    Vec5 u = to_internal(start);

    auto residuals_jacobian = [&](const Vec5& uu, Eigen::VectorXd& r,
                                  Eigen::MatrixXd& J) {
        const FitEstimates p = to_external(uu);
        const Vec5 scale = transform_jacobian(p);
        for (std::size_t i = 0; i < n; ++i) {
            const auto m = eval_model(trace.t12_us[i], p, x);
            r[static_cast<Eigen::Index>(i)] = m.value - trace.intensity[i];
            for (int k = 0; k < n_par; ++k)
                J(static_cast<Eigen::Index>(i), k) = m.d[k] * scale[k];
        }
    };

    Eigen::VectorXd r(n);
    Eigen::MatrixXd J(n, n_par);
    residuals_jacobian(u, r, J);
    double cost = 0.5 * r.squaredNorm();

    FitResult result;
    result.converged = false;
    result.iterations = 0;

    double lambda = 1e-3;
    const double cost_floor = 1e-28 * static_cast<double>(n) *
                              std::max(1.0, start.I0 * start.I0);

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        const Mat5 A = (J.transpose() * J).eval();
        const Vec5 g = J.transpose() * r;

        if (g.lpNorm<Eigen::Infinity>() < 1e-12 * std::max(1.0, cost) ||
            cost < cost_floor) {
            result.converged = true;
            result.message = "converged: gradient within tolerance";
            break;
        }

        bool accepted = false;
        while (lambda < 1e14) {
            Mat5 Adamp = A;
            const double diag_floor = 1e-12 * A.diagonal().maxCoeff();
            for (int k = 0; k < n_par; ++k)
                Adamp(k, k) += lambda * std::max(A(k, k), diag_floor);
            const Vec5 step = Adamp.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 4.0;
                continue;
            }
            const Vec5 u_try = u + step;
            Eigen::VectorXd r_try(n);
            Eigen::MatrixXd J_try(n, n_par);
            residuals_jacobian(u_try, r_try, J_try);
            const double cost_try = 0.5 * r_try.squaredNorm();
            if (cost_try < cost) {
                const double rel_drop = (cost - cost_try) / std::max(cost_try, 1e-300);
                u = u_try;
                r.swap(r_try);
                J.swap(J_try);
                cost = cost_try;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                ++result.iterations;
                if (rel_drop < config.tolerance) {
                    result.converged = true;
                    result.message = "converged: cost decrease below tolerance";
                }
                break;
            }
            lambda *= 4.0;
        }
        if (result.converged) break;
        if (!accepted) {
            // No descent direction even under maximal damping: we are at a
            // numerical stationary point.
            result.converged = true;
            result.message = "converged: no further decrease possible";
            break;
        }
    }

    result.estimates = to_external(u);
    result.residual_norm = std::sqrt(2.0 * cost);
    if (!result.converged) {
        std::ostringstream os;
        os << "no convergence after " << result.iterations << " accepted steps";
        result.message = os.str();
        const double inf = std::numeric_limits<double>::infinity();
        result.sigma = {inf, inf, inf, inf, inf};
        return result;
    }

    // Uncertainties from the residual-scaled inverse Gauss-Newton normal
    // matrix in external coordinates.
    Eigen::MatrixXd J_ext(n, n_par);
    const FitEstimates p = result.estimates;
    for (std::size_t i = 0; i < n; ++i) {
        const auto m = eval_model(trace.t12_us[i], p, x);
        for (int k = 0; k < n_par; ++k)
            J_ext(static_cast<Eigen::Index>(i), k) = m.d[k];
    }
    const Mat5 N = (J_ext.transpose() * J_ext).eval();
    Eigen::SelfAdjointEigenSolver<Mat5> es(N);
    const auto& ev = es.eigenvalues();
    if (!(ev[n_par - 1] > 0.0) || ev[0] <= 1e-14 * ev[n_par - 1]) {
        std::ostringstream os;
        os << "fit: singular normal matrix; parameters without leverage:";
        const Vec5 null_dir = es.eigenvectors().col(0);
        for (int k = 0; k < n_par; ++k)
            if (std::abs(null_dir[k]) > 0.3) os << ' ' << param_names[k];
        throw UnidentifiableFit(os.str());
    }
    const std::size_t dof = n - static_cast<std::size_t>(n_par);
    const double variance = r.squaredNorm() / static_cast<double>(dof);
    const Mat5 cov = variance * N.inverse();
    result.sigma = {std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1)),
                    std::sqrt(cov(2, 2)), std::sqrt(cov(3, 3)),
                    std::sqrt(cov(4, 4))};

    // Canonical labeling: the model is symmetric under swapping the two
    // splittings, so report the larger one first.
    if (result.estimates.delta_e_kHz > result.estimates.delta_g_kHz) {
        std::swap(result.estimates.delta_g_kHz, result.estimates.delta_e_kHz);
        std::swap(result.sigma.delta_g_kHz, result.sigma.delta_e_kHz);
    }
    return result;
}

}  // namespace shf
