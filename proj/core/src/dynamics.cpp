#include "phasemap/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace phasemap::dynamics {

namespace {

constexpr Complex kI{0.0, 1.0};

bool finite(double x) { return std::isfinite(x); }

ComplexVector<2> as_vector(const TwoLevelState& s) { return {s.lower, s.upper}; }

// Off-diagonal element H_12 of the lab Hamiltonian, envelope included.
Complex lab_coupling(const DriveField& f, double t, double scale)
{
    const double theta = f.carrier * t + f.phase;
    if (f.rwa) return -0.5 * f.rabi * scale * std::exp(kI * theta);
    return Complex{-f.rabi * scale * std::cos(theta), 0.0};
}

Complex rotating_coupling(const DriveField& f, double t, double scale)
{
    const double two_theta = 2.0 * (f.carrier * t + f.phase);
    if (f.rwa) return Complex{-0.5 * f.rabi * scale, 0.0};
    return -0.5 * f.rabi * scale * (std::exp(-kI * two_theta) + 1.0);
}

}  // namespace

void DriveField::validate() const
{
    if (!finite(rabi) || !finite(carrier) || !finite(phase)) {
        throw ConfigurationError("drive field has a non-finite parameter");
    }
    if (carrier <= 0.0) throw ConfigurationError("carrier frequency must be positive");
    if (rabi < 0.0) throw ConfigurationError("Rabi frequency must be non-negative");
}

DriveField DriveField::with_phase(double new_phase) const
{
    DriveField f = *this;
    f.phase = new_phase;
    return f;
}

DriveField DriveField::with_rabi(double new_rabi) const
{
    DriveField f = *this;
    f.rabi = new_rabi;
    return f;
}

void StepPolicy::validate() const
{
    if (steps_per_carrier_period < minimum_steps) {
        throw ConfigurationError("steps_per_carrier_period must be >= " +
                                 std::to_string(minimum_steps));
    }
}

double StepPolicy::max_step(double carrier) const
{
    return 2.0 * std::numbers::pi / carrier / static_cast<double>(steps_per_carrier_period);
}

double Envelope::factor(double t) const
{
    if (duration <= 0.0 || t >= start + duration) return 1.0;
    if (t <= start) return 0.0;
    const double s = std::sin(0.5 * std::numbers::pi * (t - start) / duration);
    return s * s;
}

double Envelope::area(double t) const
{
    if (t <= start) return 0.0;
    if (duration <= 0.0) return t - start;
    if (t >= start + duration) return 0.5 * duration + (t - start - duration);
    const double x = (t - start) / duration;
    return duration * (0.5 * x - std::sin(std::numbers::pi * x) / (2.0 * std::numbers::pi));
}

Matrix2 lab_hamiltonian(const DriveField& field, double t)
{
    const Complex g = lab_coupling(field, t, 1.0);
    return {{{Complex{0.0, 0.0}, g}, {std::conj(g), Complex{field.carrier, 0.0}}}};
}

Matrix2 rotating_hamiltonian(const DriveField& field, double t)
{
    const Complex alpha = rotating_coupling(field, t, 1.0);
    return {{{Complex{0.0, 0.0}, alpha}, {std::conj(alpha), Complex{0.0, 0.0}}}};
}

TwoLevelState to_rotating(const TwoLevelState& state, const DriveField& field, double t)
{
    if (state.frame != Frame::lab) throw ContractViolation("to_rotating expects a lab-frame state");
    const Complex q = std::exp(kI * (field.carrier * t + field.phase));
    return {state.lower, q * state.upper, Frame::rotating};
}

TwoLevelState from_rotating(const TwoLevelState& state, const DriveField& field, double t)
{
    if (state.frame != Frame::rotating) {
        throw ContractViolation("from_rotating expects a rotating-frame state");
    }
    const Complex q = std::exp(-kI * (field.carrier * t + field.phase));
    return {state.lower, q * state.upper, Frame::lab};
}

TwoLevelState evolve(const TwoLevelState& state, const DriveField& field, double t0, double t1,
                     const StepPolicy& policy, const Envelope& envelope)
{
    field.validate();
    policy.validate();
    if (!(t1 >= t0)) throw ContractViolation("evolve requires t1 >= t0");

    ComplexVector<2> y = as_vector(state);
    const double h = policy.max_step(field.carrier);
    if (state.frame == Frame::lab) {
        const auto rhs = [&](double t, const ComplexVector<2>& c) -> ComplexVector<2> {
            const Complex g = lab_coupling(field, t, envelope.factor(t));
            return {-kI * (g * c[1]), -kI * (std::conj(g) * c[0] + field.carrier * c[1])};
        };
        y = integrate_fixed<2>(rhs, y, t0, t1, h);
    } else {
        const auto rhs = [&](double t, const ComplexVector<2>& c) -> ComplexVector<2> {
            const Complex a = rotating_coupling(field, t, envelope.factor(t));
            return {-kI * (a * c[1]), -kI * (std::conj(a) * c[0])};
        };
        y = integrate_fixed<2>(rhs, y, t0, t1, h);
    }
    return {y[0], y[1], state.frame};
}

TwoLevelState pulse(const TwoLevelState& state, const DriveField& field, double area,
                    double t_start, const StepPolicy& policy)
{
    field.validate();
    if (field.rabi <= 0.0) throw ContractViolation("pulse duration undefined for g0 = 0");
    if (area < 0.0) throw ContractViolation("pulse area must be non-negative");
    return evolve(state, field, t_start, t_start + area / field.rabi, policy);
}

double shaped_pulse_duration(const DriveField& field, double area, double ramp_duration)
{
    field.validate();
    if (field.rabi <= 0.0) throw ContractViolation("pulse duration undefined for g0 = 0");
    if (ramp_duration < 0.0) throw ContractViolation("ramp duration must be non-negative");
    const double ramp_area = 0.5 * field.rabi * ramp_duration;
    const double hold = (area - ramp_area) / field.rabi;
    // Tolerate rounding when the ramp consumes exactly the whole area.
    if (hold < -1e-12 * ramp_duration) {
        throw ConfigurationError("ramp alone exceeds the requested pulse area");
    }
    return ramp_duration + std::max(hold, 0.0);
}

TwoLevelState shaped_pulse(const TwoLevelState& state, const DriveField& field, double area,
                           double t_start, double ramp_duration, const StepPolicy& policy)
{
    const double duration = shaped_pulse_duration(field, area, ramp_duration);
    return evolve(state, field, t_start, t_start + duration, policy,
                  Envelope{t_start, ramp_duration});
}

double minimum_adiabatic_ramp(double carrier)
{
    // max |d/dt g0 sin^2(pi t / 2T)| = g0 pi / (2T)
    return 5.0 * std::numbers::pi / carrier;
}

TwoLevelState time_reverse(const TwoLevelState& state, const DriveField& field, double duration,
                           double t_now, const StepPolicy& policy)
{
    if (duration < 0.0) throw ContractViolation("reversal duration must be non-negative");
    const DriveField flipped = field.with_phase(field.phase + std::numbers::pi);
    if (state.frame == Frame::lab) return evolve(state, flipped, t_now, t_now + duration, policy);
    const TwoLevelState lab = from_rotating(state, field, t_now);
    return to_rotating(evolve(lab, flipped, t_now, t_now + duration, policy), field,
                       t_now + duration);
}

Matrix2 propagator(const DriveField& field, double t0, double t1, Frame frame,
                   const StepPolicy& policy)
{
    const TwoLevelState lo = evolve({1.0, 0.0, frame}, field, t0, t1, policy);
    const TwoLevelState up = evolve({0.0, 1.0, frame}, field, t0, t1, policy);
    return {{{lo.lower, up.lower}, {lo.upper, up.upper}}};
}

double population(const TwoLevelState& state, Level which)
{
    return which == Level::lower ? std::norm(state.lower) : std::norm(state.upper);
}

double fidelity(const TwoLevelState& a, const TwoLevelState& b)
{
    if (a.frame != b.frame) throw ContractViolation("fidelity between different frames");
    const Complex overlap = std::conj(a.lower) * b.lower + std::conj(a.upper) * b.upper;
    return std::norm(overlap) / (a.norm_squared() * b.norm_squared());
}

}  // namespace phasemap::dynamics
