#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

#include "phasemap/errors.hpp"

namespace phasemap {

using Complex = std::complex<double>;

template <std::size_t N>
using ComplexVector = std::array<Complex, N>;

namespace detail {

template <std::size_t N>
ComplexVector<N> axpy(const ComplexVector<N>& y, double h, const ComplexVector<N>& k)
{
    ComplexVector<N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
    return out;
}

}  // namespace detail

/// One classical fourth-order Runge-Kutta step of dy/dt = rhs(t, y).
template <std::size_t N, class Rhs>
ComplexVector<N> rk4_step(const Rhs& rhs, double t, const ComplexVector<N>& y, double h)
{
    const auto k1 = rhs(t, y);
    const auto k2 = rhs(t + 0.5 * h, detail::axpy(y, 0.5 * h, k1));
    const auto k3 = rhs(t + 0.5 * h, detail::axpy(y, 0.5 * h, k2));
    const auto k4 = rhs(t + h, detail::axpy(y, h, k3));
    ComplexVector<N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

template <std::size_t N>
bool all_finite(const ComplexVector<N>& y)
{
    for (const auto& v : y) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

/// Number of equal steps covering `duration` with a step no longer than `max_step`.
inline std::size_t step_count(double duration, double max_step)
{
    if (duration <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(duration / max_step - 1e-9));
}

/// Fixed-step integration from t0 to t1. `observer(t, y)` runs after every step.
template <std::size_t N, class Rhs, class Observer>
ComplexVector<N> integrate_fixed(const Rhs& rhs, ComplexVector<N> y, double t0, double t1,
                                 double max_step, Observer&& observer)
{
    const std::size_t n = step_count(t1 - t0, max_step);
    if (n == 0) return y;
    const double h = (t1 - t0) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + static_cast<double>(i) * h;
        y = rk4_step<N>(rhs, t, y, h);
        if (!all_finite(y)) throw IntegrationFailure("non-finite amplitude during integration");
        observer(t0 + static_cast<double>(i + 1) * h, y);
    }
    return y;
}

template <std::size_t N, class Rhs>
ComplexVector<N> integrate_fixed(const Rhs& rhs, ComplexVector<N> y, double t0, double t1,
                                 double max_step)
{
    return integrate_fixed<N>(rhs, y, t0, t1, max_step, [](double, const ComplexVector<N>&) {});
}

}  // namespace phasemap
