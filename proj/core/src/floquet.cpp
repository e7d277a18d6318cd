#include "phasemap/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace phasemap::floquet {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_carrier(double carrier)
{
    if (!(carrier > 0.0) || !std::isfinite(carrier)) {
        throw ConfigurationError("carrier frequency must be positive");
    }
}

// Component order inside the integrator.
enum : std::size_t { kAm1, kBm1, kA0, kB0, kA1, kB1 };

ComplexVector<6> pack(const FloquetAmplitudes& f)
{
    return {f.a_m1, f.b_m1, f.a_0, f.b_0, f.a_1, f.b_1};
}

FloquetAmplitudes unpack(const ComplexVector<6>& y)
{
    return {y[kAm1], y[kBm1], y[kA0], y[kB0], y[kA1], y[kB1]};
}

}  // namespace

double FloquetAmplitudes::norm_squared() const
{
    return std::norm(a_m1) + std::norm(b_m1) + std::norm(a_0) + std::norm(b_0) + std::norm(a_1) +
           std::norm(b_1);
}

double RampProfile::rise_time(double carrier) const
{
    return ramp_periods * 2.0 * std::numbers::pi / carrier;
}

double RampProfile::rabi_at(double t, double carrier) const
{
    const dynamics::Envelope env{0.0, rise_time(carrier)};
    return peak_rabi * env.factor(t);
}

bool RampProfile::adiabatic(double carrier) const
{
    if (peak_rabi == 0.0) return true;
    if (ramp_periods <= 0.0) return false;
    return rise_time(carrier) >= dynamics::minimum_adiabatic_ramp(carrier) * (1.0 - 1e-12);
}

Trajectory integrate_truncated(const FloquetAmplitudes& init, const RampProfile& ramp,
                               double carrier, double t0, double t1,
                               const dynamics::StepPolicy& policy, std::size_t stride)
{
    require_carrier(carrier);
    policy.validate();
    if (!(t1 >= t0)) throw ContractViolation("integrate_truncated requires t1 >= t0");
    if (ramp.peak_rabi < 0.0 || !std::isfinite(ramp.peak_rabi)) {
        throw ConfigurationError("peak Rabi frequency must be finite and non-negative");
    }
    const double sigma_peak = ramp.peak_rabi / (4.0 * carrier);
    if (std::abs(init.norm_squared() - 1.0) > 2.0 * sigma_peak * sigma_peak + 1e-9) {
        throw ContractViolation("initial sideband amplitudes are not normalized");
    }
    stride = std::max<std::size_t>(stride, 1);

    Trajectory out;
    if (!ramp.adiabatic(carrier)) {
        out.warnings.emplace_back("ramp violates |dg0/dt| <= g0 omega / 10");
    }

    const double w2 = 2.0 * carrier;
    const auto rhs = [&](double t, const ComplexVector<6>& y) -> ComplexVector<6> {
        const double half_g = 0.5 * ramp.rabi_at(t, carrier);
        ComplexVector<6> d;
        d[kA0] = kI * half_g * (y[kB0] + y[kBm1]);
        d[kB0] = kI * half_g * (y[kA0] + y[kA1]);
        d[kA1] = kI * w2 * y[kA1] + kI * half_g * (y[kB1] + y[kB0]);
        d[kB1] = kI * w2 * y[kB1] + kI * half_g * y[kA1];
        d[kAm1] = -kI * w2 * y[kAm1] + kI * half_g * y[kBm1];
        d[kBm1] = -kI * w2 * y[kBm1] + kI * half_g * (y[kAm1] + y[kA0]);
        return d;
    };

    out.samples.push_back({t0, ramp.rabi_at(t0, carrier), init});
    std::size_t step = 0;
    integrate_fixed<6>(rhs, pack(init), t0, t1, policy.max_step(carrier),
                       [&](double t, const ComplexVector<6>& y) {
                           if (++step % stride == 0) {
                               out.samples.push_back({t, ramp.rabi_at(t, carrier), unpack(y)});
                           }
                       });
    return out;
}

Sidebands sidebands_from_carrier(Complex a_0, Complex b_0, double sigma)
{
    if (sigma < 0.0) throw ContractViolation("sigma must be non-negative");
    return {-sigma * b_0, sigma * a_0, -sigma * a_0, sigma * a_0};
}

FloquetAmplitudes analytic_solution(double t, double rabi, double carrier)
{
    require_carrier(carrier);
    const double sigma = rabi / (4.0 * carrier);
    const double c = std::cos(0.5 * rabi * t);
    const double s = std::sin(0.5 * rabi * t);
    FloquetAmplitudes f;
    f.a_0 = c;
    f.b_0 = kI * s;
    f.a_1 = -kI * sigma * s;
    f.b_m1 = sigma * c;
    f.a_m1 = 0.0;
    f.b_1 = 0.0;
    return f;
}

dynamics::TwoLevelState lab_frame_solution(double t, double rabi, double carrier, double phase)
{
    require_carrier(carrier);
    const double sigma = rabi / (4.0 * carrier);
    const double theta = carrier * t + phase;
    const Complex big_sigma = 0.5 * kI * std::exp(-2.0 * kI * theta);
    const double c = std::cos(0.5 * rabi * t);
    const double s = std::sin(0.5 * rabi * t);
    const Complex lower = c - 2.0 * sigma * big_sigma * s;
    const Complex upper = kI * std::exp(-kI * theta) * (s + 2.0 * sigma * std::conj(big_sigma) * c);
    return {lower, upper, dynamics::Frame::lab};
}

dynamics::TwoLevelState reconstruct(const FloquetAmplitudes& f, double t, double carrier,
                                    double phase)
{
    require_carrier(carrier);
    const double theta = carrier * t + phase;
    const Complex beta = std::exp(-2.0 * kI * theta);
    const Complex inv_beta = std::conj(beta);
    const dynamics::TwoLevelState rotating{f.a_0 + f.a_1 * beta + f.a_m1 * inv_beta,
                                           f.b_0 + f.b_1 * beta + f.b_m1 * inv_beta,
                                           dynamics::Frame::rotating};
    return dynamics::from_rotating(rotating, dynamics::DriveField{0.0, carrier, phase, false}, t);
}

double bloch_siegert_shift(double rabi, double carrier)
{
    require_carrier(carrier);
    return rabi * rabi / (4.0 * carrier);
}

std::vector<CarrierSample> integrate_effective(Complex a_0, Complex b_0, double rabi,
                                               double carrier, double t0, double t1,
                                               const dynamics::StepPolicy& policy)
{
    require_carrier(carrier);
    policy.validate();
    if (!(t1 >= t0)) throw ContractViolation("integrate_effective requires t1 >= t0");
    const double half_g = 0.5 * rabi;
    const double half_shift = 0.5 * bloch_siegert_shift(rabi, carrier);
    const auto rhs = [&](double, const ComplexVector<2>& y) -> ComplexVector<2> {
        return {kI * (half_g * y[1] + half_shift * y[0]), kI * (half_g * y[0] - half_shift * y[1])};
    };
    std::vector<CarrierSample> out{{t0, a_0, b_0}};
    integrate_fixed<2>(rhs, ComplexVector<2>{a_0, b_0}, t0, t1, policy.max_step(carrier),
                       [&](double t, const ComplexVector<2>& y) {
                           out.push_back({t, y[0], y[1]});
                       });
    return out;
}

double signal(double tau, double rabi, double carrier, double phase)
{
    require_carrier(carrier);
    const double sigma = rabi / (4.0 * carrier);
    const double p = 0.5 * (1.0 + 2.0 * sigma * std::sin(2.0 * carrier * tau + 2.0 * phase));
    return std::clamp(p, 0.0, 1.0);
}

SinusoidFit fit_double_phase_sinusoid(const std::vector<double>& phases,
                                      const std::vector<double>& values)
{
    if (phases.size() != values.size() || phases.size() < 3) {
        throw ContractViolation("sinusoid fit needs >= 3 matching samples");
    }
    // Normal equations for values ~ p sin(2 phi) + q cos(2 phi) + r.
    double n[3][3] = {};
    double rhs[3] = {};
    for (std::size_t k = 0; k < phases.size(); ++k) {
        const double basis[3] = {std::sin(2.0 * phases[k]), std::cos(2.0 * phases[k]), 1.0};
        for (int i = 0; i < 3; ++i) {
            rhs[i] += basis[i] * values[k];
            for (int j = 0; j < 3; ++j) n[i][j] += basis[i] * basis[j];
        }
    }
    const auto det3 = [](const double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double d = det3(n);
    if (std::abs(d) < 1e-14) throw ContractViolation("degenerate phase grid for sinusoid fit");
    double coef[3];
    for (int c = 0; c < 3; ++c) {
        double m[3][3];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) m[i][j] = j == c ? rhs[i] : n[i][j];
        }
        coef[c] = det3(m) / d;
    }
    // p sin x + q cos x = A sin(x + delta)
    return {std::hypot(coef[0], coef[1]), std::atan2(coef[1], coef[0]), coef[2]};
}

}  // namespace phasemap::floquet
