#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "phasemap/floquet.hpp"

using namespace phasemap;
using namespace phasemap::floquet;
using oracle::kI;
using oracle::kPi;

namespace {

struct Fig3Stats {
    double max_excess = 0.0;  // max | |a_1|^2 - sigma(t)^2 |b_0|^2 |
    double max_norm_defect = 0.0;
    double max_a1 = 0.0;
};

Fig3Stats run_ramp(double sigma, double ramp_periods, double hold_rabi_periods)
{
    const RampProfile ramp{4.0 * sigma, ramp_periods};
    const double t1 = ramp.rise_time(1.0) + hold_rabi_periods * 2.0 * kPi / ramp.peak_rabi;
    const auto traj = integrate_truncated({}, ramp, 1.0, 0.0, t1);
    Fig3Stats s;
    for (const auto& sample : traj.samples) {
        const double sigma_t = sample.rabi / 4.0;
        const double bound = sigma_t * sigma_t * std::norm(sample.amplitudes.b_0);
        s.max_excess = std::max(s.max_excess, std::abs(std::norm(sample.amplitudes.a_1) - bound));
        s.max_norm_defect =
            std::max(s.max_norm_defect, std::abs(sample.amplitudes.norm_squared() - 1.0));
        s.max_a1 = std::max(s.max_a1, std::norm(sample.amplitudes.a_1));
    }
    return s;
}

}  // namespace

TEST(Sidebands, Examples)
{
    const auto zero = sidebands_from_carrier(1.0, 0.0, 0.05);
    EXPECT_EQ(zero.a_1, Complex(0.0, 0.0));
    EXPECT_DOUBLE_EQ(zero.b_m1.real(), 0.05);
    EXPECT_DOUBLE_EQ(zero.mu_minus.real(), -0.05);
    EXPECT_DOUBLE_EQ(zero.mu_plus.real(), 0.05);
    const auto both = sidebands_from_carrier(0.0, Complex(0.0, 1.0), 0.1);
    EXPECT_NEAR(std::abs(both.a_1 - Complex(0.0, -0.1)), 0.0, 1e-16);
    EXPECT_EQ(both.b_m1, Complex(0.0, 0.0));
}

TEST(Sidebands, ScaleWithSigmaAndCarrierMagnitudes)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    for (int i = 0; i < 50; ++i) {
        const Complex a{n(rng), n(rng)}, b{n(rng), n(rng)};
        const double sigma = 0.1 * std::abs(n(rng));
        const auto s = sidebands_from_carrier(a, b, sigma);
        EXPECT_NEAR(std::abs(s.a_1), sigma * std::abs(b), 1e-14);
        EXPECT_NEAR(std::abs(s.b_m1), sigma * std::abs(a), 1e-14);
    }
    EXPECT_THROW(sidebands_from_carrier(1.0, 0.0, -0.1), ContractViolation);
}

TEST(AnalyticSolution, ZeroTimeAndGroundFollowing)
{
    const auto f = analytic_solution(0.0, 0.2, 1.0);
    EXPECT_EQ(f.a_0, Complex(1.0, 0.0));
    EXPECT_EQ(f.b_0, Complex(0.0, 0.0));
    EXPECT_EQ(f.a_1, Complex(0.0, 0.0));
    EXPECT_DOUBLE_EQ(f.b_m1.real(), 0.05);
    const auto g = analytic_solution(3.0, 0.0, 1.0);
    EXPECT_EQ(g.a_0, Complex(1.0, 0.0));
    EXPECT_EQ(g.b_m1, Complex(0.0, 0.0));
}

TEST(AnalyticSolution, PieceConsistentWithSidebandRule)
{
    for (double t : {0.0, 2.0, 7.5}) {
        const auto f = analytic_solution(t, 0.2, 1.0);
        const auto s = sidebands_from_carrier(f.a_0, f.b_0, 0.05);
        EXPECT_NEAR(std::abs(f.a_1 - s.a_1), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(f.b_m1 - s.b_m1), 0.0, 1e-15);
    }
}

TEST(LabFrameSolution, ZeroCouplingAndDressedStart)
{
    const auto s = lab_frame_solution(2.0, 0.0, 1.0, 0.4);
    EXPECT_EQ(s.lower, Complex(1.0, 0.0));
    EXPECT_EQ(s.upper, Complex(0.0, 0.0));
    // At t = 0 the upper amplitude is the sideband admixture sigma e^{i theta}.
    const auto d = lab_frame_solution(0.0, 0.2, 1.0, 0.4);
    EXPECT_NEAR(std::abs(d.upper - 0.05 * std::exp(kI * 0.4)), 0.0, 1e-15);
    EXPECT_NEAR(d.norm_squared(), 1.0 + 0.05 * 0.05, 1e-15);
}

TEST(LabFrameSolution, AgreesWithReconstructedAnalyticSolution)
{
    for (double t : {0.0, 1.0, 5.0}) {
        const auto closed = lab_frame_solution(t, 0.2, 1.0, 0.3);
        const auto rebuilt = reconstruct(analytic_solution(t, 0.2, 1.0), t, 1.0, 0.3);
        EXPECT_LE(oracle::max_amplitude_error(closed, rebuilt), 1e-14);
    }
}

TEST(Reconstruct, CarrierOnlyUndoesRotatingTransform)
{
    FloquetAmplitudes f;
    f.a_0 = 0.6;
    f.b_0 = Complex(0.0, 0.8);
    const auto s = reconstruct(f, 1.5, 1.0, 0.2);
    EXPECT_NEAR(std::abs(s.upper - Complex(0.0, 0.8) * std::exp(-kI * 1.7)), 0.0, 1e-15);
}

TEST(TruncatedSystem, ZeroFieldConservesNorm)
{
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n;
    FloquetAmplitudes f{{n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)},
                        {n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}};
    const double scale = 1.0 / std::sqrt(f.norm_squared());
    for (Complex* c : {&f.a_m1, &f.b_m1, &f.a_0, &f.b_0, &f.a_1, &f.b_1}) *c *= scale;
    const auto traj = integrate_truncated(f, {0.0, 0.0}, 1.0, 0.0, 30.0);
    for (const auto& s : traj.samples) {
        EXPECT_NEAR(s.amplitudes.norm_squared(), 1.0, 1e-6);
        EXPECT_EQ(s.amplitudes.a_0, f.a_0);
    }
}

TEST(TruncatedSystem, AdiabaticRampKeepsSidebandBelowBound)
{
    for (double sigma : {0.01, 0.02, 0.05}) {
        const auto s = run_ramp(sigma, 50.0, 2.0);
        EXPECT_LE(s.max_excess, 0.01 * sigma * sigma) << "sigma=" << sigma;
        EXPECT_LE(s.max_norm_defect, 1e-6);
        EXPECT_GT(s.max_a1, 0.9 * sigma * sigma);
    }
}

TEST(TruncatedSystem, SuddenStartWarnsAndOvershoots)
{
    const RampProfile sudden{0.4, 0.0};
    EXPECT_FALSE(sudden.adiabatic(1.0));
    const auto traj = integrate_truncated({}, sudden, 1.0, 0.0, 2.0 * 2.0 * kPi / 0.4);
    ASSERT_FALSE(traj.warnings.empty());
    double excess = 0.0;
    for (const auto& s : traj.samples) {
        excess = std::max(excess, std::norm(s.amplitudes.a_1) - 0.01 * std::norm(s.amplitudes.b_0));
    }
    EXPECT_GT(excess, 0.01 * 0.01);
}

TEST(TruncatedSystem, Contracts)
{
    FloquetAmplitudes bad;
    bad.a_0 = 2.0;
    EXPECT_THROW(integrate_truncated(bad, {0.2, 50.0}, 1.0, 0.0, 1.0), ContractViolation);
    EXPECT_THROW(integrate_truncated({}, {0.2, 50.0}, 1.0, 1.0, 0.0), ContractViolation);
    EXPECT_THROW(integrate_truncated({}, {0.2, 50.0}, 0.0, 0.0, 1.0), ConfigurationError);
    EXPECT_THROW(integrate_truncated({}, {0.2, 50.0}, 1.0, 0.0, 1.0, {20}), ConfigurationError);
    const RampProfile ramp{0.2, 50.0};
    EXPECT_TRUE(ramp.adiabatic(1.0));
    EXPECT_DOUBLE_EQ(ramp.rabi_at(ramp.rise_time(1.0) + 1.0, 1.0), 0.2);
    EXPECT_DOUBLE_EQ(ramp.rabi_at(0.0, 1.0), 0.0);
}

TEST(TruncatedSystem, StrideControlsSampleCount)
{
    const auto every = integrate_truncated({}, {0.2, 0.0}, 1.0, 0.0, 2.0 * kPi);
    const auto tenth = integrate_truncated({}, {0.2, 0.0}, 1.0, 0.0, 2.0 * kPi, {}, 10);
    EXPECT_EQ(every.samples.size(), 201u);
    EXPECT_EQ(tenth.samples.size(), 21u);
    EXPECT_EQ(tenth.samples.back().amplitudes.a_0, every.samples.back().amplitudes.a_0);
}

TEST(BlochSiegert, ShiftValue)
{
    EXPECT_DOUBLE_EQ(bloch_siegert_shift(0.2, 1.0), 0.01);
    EXPECT_DOUBLE_EQ(bloch_siegert_shift(0.0, 1.0), 0.0);
    EXPECT_THROW(bloch_siegert_shift(0.2, 0.0), ConfigurationError);
}

TEST(EffectiveCarrier, MatchesDetunedRabiClosedForm)
{
    const double rabi = 0.2;
    const auto traj = integrate_effective(1.0, 0.0, rabi, 1.0, 0.0, 60.0);
    for (std::size_t k = 0; k < traj.size(); k += 97) {
        const auto ref = oracle::detuned_rabi(traj[k].t, rabi, bloch_siegert_shift(rabi, 1.0));
        EXPECT_NEAR(std::abs(traj[k].a_0 - ref.a), 0.0, 1e-9);
        EXPECT_NEAR(std::abs(traj[k].b_0 - ref.b), 0.0, 1e-9);
    }
}

// The carrier pair of the full truncated system follows the effective
// two-level system; the residual comes from the sideband norm ~ sigma^2.
TEST(EffectiveCarrier, TracksTruncatedSystemFromDressedStart)
{
    const double sigma = 0.02;
    const double rabi = 4.0 * sigma;
    const auto dressed = analytic_solution(0.0, rabi, 1.0);
    const double t1 = 2.0 * kPi / rabi;
    const auto full = integrate_truncated(dressed, {rabi, 0.0}, 1.0, 0.0, t1);
    const auto eff = integrate_effective(1.0, 0.0, rabi, 1.0, 0.0, t1);
    ASSERT_EQ(full.samples.size(), eff.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < eff.size(); ++k) {
        worst = std::max(worst, std::abs(full.samples[k].amplitudes.b_0 - eff[k].b_0));
    }
    EXPECT_LE(worst, 5.0 * sigma * sigma);
}

TEST(Signal, ValuesAndClamp)
{
    EXPECT_DOUBLE_EQ(signal(0.0, 0.0, 1.0, 0.7), 0.5);
    EXPECT_DOUBLE_EQ(signal(0.0, 0.2, 1.0, 0.0), 0.5);
    EXPECT_NEAR(signal(0.0, 0.2, 1.0, kPi / 4), 0.55, 1e-15);
    EXPECT_EQ(signal(0.0, 4.0, 1.0, kPi / 4), 1.0);
    EXPECT_EQ(signal(0.0, 4.0, 1.0, -kPi / 4), 0.0);
}

TEST(SinusoidFit, RecoversKnownParameters)
{
    std::vector<double> phases, values;
    for (int k = 0; k < 32; ++k) {
        const double phi = kPi * k / 32.0;
        phases.push_back(phi);
        values.push_back(0.04 * std::sin(2.0 * phi - 1.1) + 0.51);
    }
    const auto fit = fit_double_phase_sinusoid(phases, values);
    EXPECT_NEAR(fit.amplitude, 0.04, 1e-13);
    EXPECT_NEAR(fit.offset, -1.1, 1e-12);
    EXPECT_NEAR(fit.baseline, 0.51, 1e-13);
    EXPECT_THROW(fit_double_phase_sinusoid({0.0, 1.0}, {0.0, 1.0}), ContractViolation);
    EXPECT_THROW(fit_double_phase_sinusoid({0.0, kPi, 2 * kPi}, {0.0, 1.0, 0.0}), ContractViolation);
}
