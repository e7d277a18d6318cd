#pragma once

#include <array>
#include <complex>

#include "phasemap/rk4.hpp"

/// Single-atom two-level evolution driven by a linearly polarized field
/// g(t) = -g0 cos(omega t + phase), with the upper level at energy omega.
/// Units: hbar = 1, every frequency in angular units, times in 1/omega.
namespace phasemap::dynamics {

enum class Frame { lab, rotating };

enum class Level { lower, upper };

struct TwoLevelState {
    Complex lower{1.0, 0.0};
    Complex upper{0.0, 0.0};
    Frame frame = Frame::lab;

    double norm_squared() const { return std::norm(lower) + std::norm(upper); }
};

struct DriveField {
    double rabi = 0.0;     // g0
    double carrier = 1.0;  // omega
    double phase = 0.0;    // phi for Alice, chi for Bob
    bool rwa = false;      // drop the counter-rotating exp(-2i(omega t + phase)) part

    /// Throws ConfigurationError unless carrier > 0 and rabi >= 0, all finite.
    void validate() const;

    double sigma() const { return rabi / (4.0 * carrier); }

    /// Set once sigma > 0.1, where the first-order corrections stop being small.
    bool perturbative_warning() const { return sigma() > 0.1; }

    DriveField with_phase(double new_phase) const;
    DriveField with_rabi(double new_rabi) const;
};

struct StepPolicy {
    int steps_per_carrier_period = 200;

    static constexpr int minimum_steps = 50;

    void validate() const;
    double max_step(double carrier) const;
};

/// Multiplies g0 by sin^2 of a quarter wave over [start, start + duration],
/// then holds 1. A zero duration means a sudden turn-on.
struct Envelope {
    double start = 0.0;
    double duration = 0.0;

    double factor(double t) const;
    /// Time integral of factor() from `start` to t.
    double area(double t) const;
};

using Matrix2 = std::array<std::array<Complex, 2>, 2>;

Matrix2 lab_hamiltonian(const DriveField& field, double t);
Matrix2 rotating_hamiltonian(const DriveField& field, double t);

/// Rotating-wave transform: upper amplitude times exp(i(omega t + phase)).
TwoLevelState to_rotating(const TwoLevelState& state, const DriveField& field, double t);
TwoLevelState from_rotating(const TwoLevelState& state, const DriveField& field, double t);

/// Integrates the Schroedinger equation from t0 to t1 in the state's own
/// frame. Rotating-frame amplitudes are taken relative to `field`.
TwoLevelState evolve(const TwoLevelState& state, const DriveField& field, double t0, double t1,
                     const StepPolicy& policy = {}, const Envelope& envelope = {});

/// evolve() over area / g0 starting at t_start.
TwoLevelState pulse(const TwoLevelState& state, const DriveField& field, double area,
                    double t_start, const StepPolicy& policy = {});

/// Duration of a pulse of the given area whose leading edge is a sine-squared
/// ramp of length ramp_duration. Throws if the ramp alone exceeds the area.
double shaped_pulse_duration(const DriveField& field, double area, double ramp_duration);

/// Pulse with a sine-squared leading edge and a sudden trailing edge.
TwoLevelState shaped_pulse(const TwoLevelState& state, const DriveField& field, double area,
                           double t_start, double ramp_duration, const StepPolicy& policy = {});

/// Shortest sine-squared ramp with |dg0/dt| <= g0 omega / 10.
double minimum_adiabatic_ramp(double carrier);

/// Runs the field with its phase shifted by pi for duration T, starting at t_now.
TwoLevelState time_reverse(const TwoLevelState& state, const DriveField& field, double duration,
                           double t_now, const StepPolicy& policy = {});

/// Columns are the evolved basis states |lower>, |upper> of `frame`.
Matrix2 propagator(const DriveField& field, double t0, double t1, Frame frame,
                   const StepPolicy& policy = {});

double population(const TwoLevelState& state, Level which);

/// |<a|b>|^2 over normalized inputs. Throws if the frames differ.
double fidelity(const TwoLevelState& a, const TwoLevelState& b);

}  // namespace phasemap::dynamics
