#ifndef SONINE_FFT_HPP
#define SONINE_FFT_HPP

// Thin RAII layer over FFTW's real-to-complex transforms plus the
// derivative operators built on top of it.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "sonine/errors.hpp"

namespace sonine {

using Complex = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

namespace detail {
// FFTW planning is not thread-safe; execution on separate buffers is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// Real-input DFT of fixed length n (unnormalized, FFTW sign convention
/// X_k = sum_j x_j e^{-2 pi i jk/n}).
class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n), real_(n), spec_(n / 2 + 1) {
        if (n < 2) throw DomainError("FFT length must be at least 2");
        std::lock_guard lock(detail::fftw_planner_mutex());
        auto* r = real_.data();
        auto* c = reinterpret_cast<fftw_complex*>(spec_.data());
        forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), r, c, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), c, r, FFTW_ESTIMATE);
        if (!forward_ || !backward_) throw NumericalError("FFTW plan creation failed");
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    ~RealFft() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    std::size_t size() const { return n_; }

    std::vector<Complex> forward(std::span<const double> x) {
        if (x.size() != n_) throw DomainError("FFT input length mismatch");
        std::copy(x.begin(), x.end(), real_.begin());
        fftw_execute(forward_);
        return spec_;
    }

    /// Inverse transform, normalized so that backward(forward(x)) == x.
    std::vector<double> backward(std::span<const Complex> spectrum) {
        if (spectrum.size() != n_ / 2 + 1) throw DomainError("FFT spectrum length mismatch");
        std::copy(spectrum.begin(), spectrum.end(), spec_.begin());
        fftw_execute(backward_);
        std::vector<double> out(real_);
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& v : out) v *= scale;
        return out;
    }

private:
    std::size_t n_;
    std::vector<double> real_;
    std::vector<Complex> spec_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

/// Angular frequencies of the half spectrum for n samples at spacing h.
inline std::vector<double> half_spectrum_frequencies(std::size_t n, double h) {
    std::vector<double> xi(n / 2 + 1);
    const double base = 2.0 * std::numbers::pi / (static_cast<double>(n) * h);
    for (std::size_t k = 0; k < xi.size(); ++k) xi[k] = base * static_cast<double>(k);
    return xi;
}

enum class DiffMethod { automatic, spectral, fd4 };

/// Fourier differentiation (periodic extension); the Nyquist mode is zeroed.
inline std::vector<double> spectral_derivative(std::span<const double> f, double h) {
    RealFft fft(f.size());
    auto spec = fft.forward(f);
    const auto xi = half_spectrum_frequencies(f.size(), h);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= Complex(0.0, xi[k]);
    if (f.size() % 2 == 0) spec.back() = 0.0;
    return fft.backward(spec);
}

/// Fourth-order finite differences: centered in the interior, one-sided
/// five-point closures at the two nodes nearest each end.
inline std::vector<double> fd4_derivative(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 5) throw DomainError("fourth-order differences need at least 5 nodes");
    std::vector<double> d(n);
    const double c = 1.0 / (12.0 * h);
    d[0] = c * (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]);
    d[1] = c * (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]);
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = c * (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]);
    d[n - 2] = -c * (-3 * f[n - 1] - 10 * f[n - 2] + 18 * f[n - 3] - 6 * f[n - 4] + f[n - 5]);
    d[n - 1] = -c * (-25 * f[n - 1] + 48 * f[n - 2] - 36 * f[n - 3] + 16 * f[n - 4] - 3 * f[n - 5]);
    return d;
}

/// True when both end samples are below `eps` relative to the peak.
inline bool edges_decayed(std::span<const double> f, double eps) {
    double peak = 0.0;
    for (double v : f) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return true;
    return std::max(std::abs(f.front()), std::abs(f.back())) <= eps * peak;
}

inline constexpr double kDefaultTruncation = 1e-12;

/// Spectral when n is a power of two and the data has decayed at both
/// edges, otherwise fourth-order differences.
inline std::vector<double> differentiate(std::span<const double> f, double h,
                                         DiffMethod method = DiffMethod::automatic,
                                         double eps_trunc = kDefaultTruncation) {
    if (method == DiffMethod::automatic)
        method = (is_power_of_two(f.size()) && edges_decayed(f, eps_trunc)) ? DiffMethod::spectral
                                                                           : DiffMethod::fd4;
    return method == DiffMethod::spectral ? spectral_derivative(f, h) : fd4_derivative(f, h);
}

}  // namespace sonine

#endif  // SONINE_FFT_HPP
