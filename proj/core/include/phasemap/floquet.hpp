#pragma once

#include <string>
#include <vector>

#include "phasemap/dynamics.hpp"

/// Harmonic (sideband) expansion of the rotating-frame state,
///   C~ = sum_n (a_n, b_n) beta^n,  beta = exp(-2i(omega t + phi)),
/// truncated to |n| <= 1, with its adiabatic-elimination solution.
namespace phasemap::floquet {

struct FloquetAmplitudes {
    Complex a_m1{}, b_m1{};
    Complex a_0{1.0, 0.0}, b_0{};
    Complex a_1{}, b_1{};

    double norm_squared() const;
};

/// g0(t) rising as sin^2 over `ramp_periods` carrier periods, then constant.
/// ramp_periods = 0 gives a constant g0.
struct RampProfile {
    double peak_rabi = 0.0;
    double ramp_periods = 50.0;

    double rise_time(double carrier) const;
    double rabi_at(double t, double carrier) const;
    /// |dg0/dt| <= g0 omega / 10 everywhere on the ramp.
    bool adiabatic(double carrier) const;
};

struct TrajectorySample {
    double t = 0.0;
    double rabi = 0.0;
    FloquetAmplitudes amplitudes;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<std::string> warnings;
};

/// Six coupled equations for (a_-1, b_-1, a_0, b_0, a_1, b_1). The first
/// sample is the initial condition; then one sample every `stride` steps.
Trajectory integrate_truncated(const FloquetAmplitudes& init, const RampProfile& ramp,
                               double carrier, double t0, double t1,
                               const dynamics::StepPolicy& policy = {}, std::size_t stride = 1);

struct Sidebands {
    Complex a_1, b_m1;
    Complex mu_minus, mu_plus;  // a_-1 -/+ b_-1
};

/// Adiabatic following of the far-detuned sidebands: a_1 = -sigma b_0,
/// b_-1 = sigma a_0 (a_-1 and b_1 vanish at this order).
Sidebands sidebands_from_carrier(Complex a_0, Complex b_0, double sigma);

/// Lowest-order solution starting from the lower state.
FloquetAmplitudes analytic_solution(double t, double rabi, double carrier);

/// The lowest-order solution transformed back to the lab frame.
dynamics::TwoLevelState lab_frame_solution(double t, double rabi, double carrier, double phase);

/// Sums the sideband series at time t and undoes the rotating transform.
dynamics::TwoLevelState reconstruct(const FloquetAmplitudes& amplitudes, double t, double carrier,
                                    double phase);

/// Delta = g0^2 / (4 omega).
double bloch_siegert_shift(double rabi, double carrier);

struct CarrierSample {
    double t = 0.0;
    Complex a_0, b_0;
};

/// The carrier pair with the sidebands eliminated: a two-level system
/// detuned by the Bloch-Siegert shift.
std::vector<CarrierSample> integrate_effective(Complex a_0, Complex b_0, double rabi,
                                               double carrier, double t0, double t1,
                                               const dynamics::StepPolicy& policy = {});

/// [1 + 2 sigma sin(2 omega tau + 2 phi)] / 2, clamped to [0, 1].
double signal(double tau, double rabi, double carrier, double phase);

/// Least-squares fit of values ~ amplitude sin(2 phi + offset) + baseline,
/// amplitude >= 0.
struct SinusoidFit {
    double amplitude = 0.0;
    double offset = 0.0;
    double baseline = 0.0;
};

SinusoidFit fit_double_phase_sinusoid(const std::vector<double>& phases,
                                      const std::vector<double>& values);

}  // namespace phasemap::floquet
