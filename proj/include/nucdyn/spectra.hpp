// Copyright 2026 The nucdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <fftw3.h>

#include "nucdyn/dynamics.hpp"
#include "nucdyn/error.hpp"
#include "nucdyn/grid.hpp"
#include "nucdyn/units.hpp"

namespace nucdyn {

struct SpectrumOptions {
    bool hann = false;
    int padding = 4;
    double threshold = 1e-3;  // relative to the strongest non-zero-frequency bin

    void validate() const {
        if (padding < 1 || padding > 64) throw ValidationError("spectrum: padding must lie in [1, 64]");
        if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("spectrum: threshold must lie in (0, 1)");
    }
};

struct Peak {
    double omega_cm1 = 0.0;
    double intensity = 0.0;
    double weight = 0.0;  // amplitude of the cosine component
};

/// One-sided power spectrum. intensity[k] = |X_k|^2 / n (times dx per grid
/// channel), with X the DFT of the mean-removed, windowed, zero-padded series.
struct Spectrum {
    std::vector<double> omega_cm1;
    std::vector<double> intensity;
    std::optional<Eigen::MatrixXd> grid_intensity;  // (frequency, grid point)
    bool hann = false;
    int padding = 1;
    double threshold = 1e-3;
    std::size_t samples = 0;
    double dt_fs = 0.0;
    double resolution_cm1 = 0.0;  // 2 pi / (S dt), S = samples - 1
    double bin_cm1 = 0.0;         // spacing of omega_cm1
    double nyquist_cm1 = 0.0;
    double zero_weight = 0.0;     // mean level removed before the transform
    std::vector<Peak> peaks;

    std::size_t padded_length() const { return samples * static_cast<std::size_t>(padding); }

    /// Two-sided sum of intensities divided by the padding factor; equals the
    /// (weighted) sum of squared mean-removed, windowed samples.
    double total_power() const {
        const std::size_t np = padded_length();
        double sum = 0.0;
        for (std::size_t k = 0; k < intensity.size(); ++k) {
            const bool self_conjugate = k == 0 || (np % 2 == 0 && k == np / 2);
            sum += (self_conjugate ? 1.0 : 2.0) * intensity[k];
        }
        return sum / padding;
    }
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex mu;
    return mu;
}

class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n) {
        in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
        out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
        if (!in_ || !out_) throw NumericalError("spectrum: FFT buffer allocation failed");
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
        if (!plan_) throw NumericalError("spectrum: FFT planning failed");
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    ~RealFft() {
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex());
            if (plan_) fftw_destroy_plan(plan_);
        }
        fftw_free(in_);
        fftw_free(out_);
    }

    double* input() { return in_; }
    std::size_t bins() const { return n_ / 2 + 1; }
    void execute() { fftw_execute(plan_); }
    double power(std::size_t k) const { return out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1]; }

private:
    std::size_t n_;
    double* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

inline std::vector<double> window(std::size_t n, bool hann) {
    std::vector<double> w(n, 1.0);
    if (hann && n > 1)
        for (std::size_t s = 0; s < n; ++s)
            w[s] = 0.5 - 0.5 * std::cos(2.0 * units::kPi * static_cast<double>(s) / static_cast<double>(n - 1));
    return w;
}

// Vertex offset of the parabola through (-1, a), (0, b), (1, c).
inline double parabola_offset(double a, double b, double c) {
    const double den = a - 2.0 * b + c;
    if (den >= 0.0) return 0.0;
    return std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
}

/// Columns of `series` are channels sampled every dt_fs; each channel's power
/// is scaled by `channel_weight`.
inline Spectrum analyze(const Eigen::MatrixXd& series, double dt_fs, double channel_weight,
                        const SpectrumOptions& opt, bool keep_channels) {
    opt.validate();
    const auto n = static_cast<std::size_t>(series.rows());
    if (n < 65) throw ValidationError("spectrum: need at least 64 time steps");
    if (!(dt_fs > 0.0)) throw ValidationError("spectrum: time step must be positive");
    if (!series.allFinite()) throw NumericalError("spectrum: series contains non-finite values");

    Spectrum sp;
    sp.hann = opt.hann;
    sp.padding = opt.padding;
    sp.threshold = opt.threshold;
    sp.samples = n;
    sp.dt_fs = dt_fs;
    const std::size_t np = sp.padded_length();
    const double dt_au = units::fs_to_au(dt_fs);
    sp.bin_cm1 = units::hartree_to_wavenumber(2.0 * units::kPi / (static_cast<double>(np) * dt_au));
    sp.resolution_cm1 = units::hartree_to_wavenumber(2.0 * units::kPi / (static_cast<double>(n - 1) * dt_au));
    sp.nyquist_cm1 = units::hartree_to_wavenumber(units::kPi / dt_au);

    const std::vector<double> w = window(n, opt.hann);
    const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    RealFft fft(np);
    const std::size_t bins = fft.bins();
    sp.omega_cm1.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) sp.omega_cm1[k] = static_cast<double>(k) * sp.bin_cm1;
    sp.intensity.assign(bins, 0.0);
    if (keep_channels) sp.grid_intensity = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(bins), series.cols());

    double fluct = 0.0, level = 0.0;
    for (Eigen::Index ch = 0; ch < series.cols(); ++ch) {
        const double mean = series.col(ch).mean();
        level += mean * mean;
        sp.zero_weight += mean;
        double* in = fft.input();
        std::fill(in, in + np, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            const double x = series(static_cast<Eigen::Index>(s), ch) - mean;
            fluct += x * x;
            in[s] = w[s] * x;
        }
        fft.execute();
        for (std::size_t k = 0; k < bins; ++k) {
            const double p = channel_weight * fft.power(k) / static_cast<double>(n);
            sp.intensity[k] += p;
            if (keep_channels) (*sp.grid_intensity)(static_cast<Eigen::Index>(k), ch) = p;
        }
    }
    if (series.cols() == 1) sp.zero_weight = series.col(0).mean();

    // A flat series (stationary state) carries only round-off.
    const double rms = std::sqrt(fluct / static_cast<double>(n * static_cast<std::size_t>(series.cols())));
    const double lvl = std::sqrt(level / static_cast<double>(series.cols()));
    if (rms <= 1e-9 * std::max(lvl, std::numeric_limits<double>::min())) return sp;

    double top = 0.0;
    for (std::size_t k = 1; k < bins; ++k) top = std::max(top, sp.intensity[k]);
    const double floor = opt.threshold * top;
    for (std::size_t k = 1; k + 1 < bins; ++k) {
        const double a = sp.intensity[k - 1], b = sp.intensity[k], c = sp.intensity[k + 1];
        if (!(b > a && b >= c && b >= floor)) continue;
        const double ma = std::sqrt(a), mb = std::sqrt(b), mc = std::sqrt(c);
        const double off = parabola_offset(ma, mb, mc);
        const double peak_mag = mb - 0.25 * (ma - mc) * off;
        Peak pk;
        pk.omega_cm1 = (static_cast<double>(k) + off) * sp.bin_cm1;
        pk.intensity = peak_mag * peak_mag;
        // |X| = A wsum / 2 for a cosine of amplitude A
        pk.weight = 2.0 * std::sqrt(pk.intensity * static_cast<double>(n) / channel_weight) / wsum;
        sp.peaks.push_back(pk);
    }
    return sp;
}

inline void require_uniform(const Trajectory& t) {
    const std::size_t n = t.times_fs.size();
    if (n < 2) throw ValidationError("spectrum: need at least 64 time steps");
    const double dt = (t.times_fs.back() - t.times_fs.front()) / static_cast<double>(n - 1);
    for (std::size_t s = 0; s < n; ++s)
        if (std::abs(t.times_fs[s] - t.times_fs.front() - static_cast<double>(s) * dt) > 1e-6 * dt)
            throw ValidationError("spectrum: time axis is not uniform");
}

}  // namespace detail

/// P(w) = sum_i |I(w; x_i)|^2 dx over the mean-removed grid densities.
inline Spectrum grid_spectrum(const Trajectory& traj, double dx_angstrom, const SpectrumOptions& opt = {}) {
    detail::require_uniform(traj);
    if (!(dx_angstrom > 0.0)) throw ValidationError("spectrum: grid spacing must be positive");
    const std::size_t n = traj.times_fs.size();
    const double dt = (traj.times_fs.back() - traj.times_fs.front()) / static_cast<double>(n - 1);
    return detail::analyze(traj.densities, dt, dx_angstrom, opt, true);
}

/// Spectrum of C(t_s) = |<psi(0)|psi(t_s)>|^2 from per-step amplitudes (rows).
inline Spectrum autocorrelation_spectrum(const Eigen::MatrixXcd& amplitudes, double dt_fs,
                                         const SpectrumOptions& opt = {}) {
    if (amplitudes.rows() < 1) throw ValidationError("spectrum: empty amplitude series");
    const Eigen::VectorXcd psi0 = amplitudes.row(0).transpose();
    Eigen::MatrixXd c(amplitudes.rows(), 1);
    for (Eigen::Index s = 0; s < amplitudes.rows(); ++s) c(s, 0) = std::norm(amplitudes.row(s).dot(psi0.transpose()));
    return detail::analyze(c, dt_fs, 1.0, opt, false);
}

inline Spectrum autocorrelation_spectrum(const Trajectory& traj, const SpectrumOptions& opt = {}) {
    if (traj.empirical() || !traj.amplitudes)
        throw ValidationError("spectrum: autocorrelation needs an exact-amplitude trajectory");
    detail::require_uniform(traj);
    const std::size_t n = traj.times_fs.size();
    return autocorrelation_spectrum(*traj.amplitudes, (traj.times_fs.back() - traj.times_fs.front()) / static_cast<double>(n - 1), opt);
}

// ---------------------------------------------------------------------------
// Matching peaks to eigenenergy differences

struct PeakMatch {
    Peak peak;
    std::size_t lower = 0, upper = 0;  // levels of the nearest line
    double line_cm1 = 0.0;             // true line position
    bool aliased = false;              // line lies above Nyquist and folds onto the peak
    double error_cm1 = 0.0;
    double error_kcal = 0.0;
};

/// Where a line at omega appears after sampling with the given Nyquist frequency.
inline double folded_frequency(double omega_cm1, double nyquist_cm1) {
    const double fs = 2.0 * nyquist_cm1;
    double r = std::fmod(omega_cm1, fs);
    if (r > nyquist_cm1) r = fs - r;
    return r;
}

/// Nearest (E_j - E_i) line for every peak, over levels below max_levels.
/// Lines above Nyquist are compared at their folded position.
inline std::vector<PeakMatch> compare_eigendiffs(const Spectrum& sp, const EigenSystem& eig,
                                                 std::size_t max_levels = std::numeric_limits<std::size_t>::max()) {
    if (sp.peaks.empty()) throw NumericalError("spectrum: no peaks found");
    const std::size_t levels = std::min<std::size_t>(max_levels, static_cast<std::size_t>(eig.size()));
    std::vector<PeakMatch> out;
    for (const Peak& pk : sp.peaks) {
        PeakMatch best;
        best.peak = pk;
        best.error_cm1 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < levels; ++i)
            for (std::size_t j = i + 1; j < levels; ++j) {
                const double line = units::hartree_to_wavenumber(eig.energies[static_cast<Eigen::Index>(j)] -
                                                                 eig.energies[static_cast<Eigen::Index>(i)]);
                const bool above = sp.nyquist_cm1 > 0.0 && line > sp.nyquist_cm1;
                const double seen = above ? folded_frequency(line, sp.nyquist_cm1) : line;
                const double err = std::abs(pk.omega_cm1 - seen);
                if (err < best.error_cm1) {
                    best.lower = i;
                    best.upper = j;
                    best.line_cm1 = line;
                    best.aliased = above;
                    best.error_cm1 = err;
                }
            }
        best.error_kcal = units::hartree_to_kcal(units::wavenumber_to_hartree(best.error_cm1));
        out.push_back(best);
    }
    return out;
}

struct LevelMatch {
    std::size_t level = 0;  // j in E_j - E_0
    double line_cm1 = 0.0;
    double peak_cm1 = 0.0;
    double error_cm1 = 0.0;
    double error_kcal = 0.0;
};

/// Nearest peak to each of E_1 - E_0, ..., E_count - E_0.
inline std::vector<LevelMatch> level_difference_errors(const Spectrum& sp, const EigenSystem& eig, std::size_t count) {
    if (sp.peaks.empty()) throw NumericalError("spectrum: no peaks found");
    if (count + 1 > static_cast<std::size_t>(eig.size())) throw ValidationError("spectrum: not enough levels");
    std::vector<LevelMatch> out;
    for (std::size_t j = 1; j <= count; ++j) {
        LevelMatch m;
        m.level = j;
        m.line_cm1 = units::hartree_to_wavenumber(eig.energies[static_cast<Eigen::Index>(j)] - eig.energies[0]);
        m.error_cm1 = std::numeric_limits<double>::infinity();
        for (const Peak& pk : sp.peaks) {
            const double err = std::abs(pk.omega_cm1 - m.line_cm1);
            if (err < m.error_cm1) {
                m.error_cm1 = err;
                m.peak_cm1 = pk.omega_cm1;
            }
        }
        m.error_kcal = units::hartree_to_kcal(units::wavenumber_to_hartree(m.error_cm1));
        out.push_back(m);
    }
    return out;
}

}  // namespace nucdyn
