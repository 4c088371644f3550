#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "poincare/errors.hpp"

namespace poincare {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Finite real trigonometric polynomial
///   g(θ) = Σ_k cosc[k]·cos(kθ) + Σ_k sinc[k-1]·sin(kθ).
/// The workhorse representation for boundary matrices, right-hand sides
/// and curve coordinates; closed under differentiation.
struct FourierTable {
    Eigen::VectorXd cosc;  // k = 0, 1, ...
    Eigen::VectorXd sinc;  // k = 1, 2, ...

    FourierTable() : cosc(Eigen::VectorXd::Zero(1)), sinc(0) {}
    FourierTable(Eigen::VectorXd c, Eigen::VectorXd s) : cosc(std::move(c)), sinc(std::move(s)) {
        if (cosc.size() == 0) cosc = Eigen::VectorXd::Zero(1);
    }

    static FourierTable constant(double v) {
        FourierTable t;
        t.cosc(0) = v;
        return t;
    }
    static FourierTable harmonic_cos(int k, double amp) {
        FourierTable t;
        t.cosc = Eigen::VectorXd::Zero(k + 1);
        t.cosc(k) = amp;
        return t;
    }
    static FourierTable harmonic_sin(int k, double amp) {
        FourierTable t;
        t.sinc = Eigen::VectorXd::Zero(k);
        t.sinc(k - 1) = amp;
        return t;
    }

    double operator()(double theta) const {
        double v = 0.0;
        for (int k = 0; k < cosc.size(); ++k) v += cosc(k) * std::cos(k * theta);
        for (int k = 1; k <= sinc.size(); ++k) v += sinc(k - 1) * std::sin(k * theta);
        return v;
    }

    double derivative(double theta) const {
        double v = 0.0;
        for (int k = 1; k < cosc.size(); ++k) v -= cosc(k) * k * std::sin(k * theta);
        for (int k = 1; k <= sinc.size(); ++k) v += sinc(k - 1) * k * std::cos(k * theta);
        return v;
    }

    double second_derivative(double theta) const {
        double v = 0.0;
        for (int k = 1; k < cosc.size(); ++k) v -= cosc(k) * k * k * std::cos(k * theta);
        for (int k = 1; k <= sinc.size(); ++k) v -= sinc(k - 1) * k * k * std::sin(k * theta);
        return v;
    }

    int degree() const {
        return static_cast<int>(std::max<Eigen::Index>(cosc.size() - 1, sinc.size()));
    }

    bool is_zero(double tol = 0.0) const {
        return cosc.lpNorm<Eigen::Infinity>() <= tol &&
               (sinc.size() == 0 || sinc.lpNorm<Eigen::Infinity>() <= tol);
    }
};

namespace detail {

/// Plain O(N^2) DFT: coeff[k] = (1/N) Σ_l v[l] e^{-2πikl/N}.  Grids in this
/// library stay ≤ a few thousand nodes, where this is cheap and avoids an
/// FFT dependency.
inline Eigen::VectorXcd dft(const Eigen::VectorXcd& v) {
    const Eigen::Index n = v.size();
    Eigen::VectorXcd c(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (Eigen::Index l = 0; l < n; ++l) {
            const double ph = -two_pi * static_cast<double>(k) * static_cast<double>(l) /
                              static_cast<double>(n);
            acc += v(l) * cplx(std::cos(ph), std::sin(ph));
        }
        c(k) = acc / static_cast<double>(n);
    }
    return c;
}

/// Signed-mode coefficient from a DFT table: mode(k) for k in [-N/2, N/2).
inline cplx dft_mode(const Eigen::VectorXcd& coeff, int k) {
    const int n = static_cast<int>(coeff.size());
    return coeff((k % n + n) % n);
}

/// Derivative of a 2π-periodic sample vector by Fourier multipliers ik.
/// The Nyquist mode is differentiated to zero (the usual convention for
/// even N; exact for real data whose top mode is a pure cosine).
inline Eigen::VectorXcd spectral_derivative(const Eigen::VectorXcd& v) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXcd c = dft(v);
    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(n);
    for (int k = -n / 2 + 1; k < n / 2; ++k) {
        const int idx = (k % n + n) % n;
        d(idx) = c(idx) * cplx(0.0, k);
    }
    // inverse transform
    Eigen::VectorXcd out(n);
    for (int l = 0; l < n; ++l) {
        cplx acc = 0.0;
        for (int k = 0; k < n; ++k) {
            const double ph = two_pi * static_cast<double>(k) * static_cast<double>(l) /
                              static_cast<double>(n);
            acc += d(k) * cplx(std::cos(ph), std::sin(ph));
        }
        out(l) = acc;
    }
    return out;
}

/// Trigonometric interpolation of uniform samples at an arbitrary angle.
/// The Nyquist mode is split symmetrically so real data stays real.
inline cplx trig_eval(const Eigen::VectorXcd& coeff, double theta) {
    const int n = static_cast<int>(coeff.size());
    cplx acc = 0.0;
    for (int k = -n / 2 + 1; k < n / 2; ++k) {
        acc += dft_mode(coeff, k) * cplx(std::cos(k * theta), std::sin(k * theta));
    }
    const cplx nyq = coeff(n / 2);
    acc += nyq * std::cos(n / 2 * theta);
    return acc;
}

/// Resample a periodic vector onto an m-point uniform grid (m ≥ n).
inline Eigen::VectorXcd trig_resample(const Eigen::VectorXcd& v, int m) {
    Eigen::VectorXcd c = dft(v);
    Eigen::VectorXcd out(m);
    for (int l = 0; l < m; ++l) out(l) = trig_eval(c, two_pi * l / m);
    return out;
}

/// Standard trigonometric differentiation matrix on the uniform 2π grid,
/// even N: D(i,j) = (1/2)(-1)^{i-j} cot((θ_i-θ_j)/2), zero diagonal.
inline Eigen::MatrixXd diff_matrix(int n) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double sgn = ((i - j) % 2 == 0) ? 1.0 : -1.0;
            d(i, j) = 0.5 * sgn / std::tan(std::numbers::pi * (i - j) / n);
        }
    }
    return d;
}

/// ∫_0^{2π} θ g(θ) dθ for periodic g given by uniform samples, evaluated
/// through the Fourier series (the integrand itself is not periodic, so a
/// trapezoidal sum would lose spectral accuracy).
inline cplx weighted_theta_integral(const Eigen::VectorXcd& samples) {
    const int n = static_cast<int>(samples.size());
    const Eigen::VectorXcd c = dft(samples);
    cplx acc = c(0) * (two_pi * std::numbers::pi);
    for (int k = -n / 2 + 1; k < n / 2; ++k) {
        if (k == 0) continue;
        acc += dft_mode(c, k) * (two_pi / cplx(0.0, k));
    }
    // Nyquist mode is read as cos((N/2)θ), whose θ-weighted integral vanishes.
    return acc;
}

}  // namespace detail
}  // namespace poincare
