#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>

#include "phasemap/dynamics.hpp"

/// Two-party phase teleportation. Each atom has degenerate ground levels
/// |1>, |2> and an upper level |3> at energy omega; Alice drives with
/// phase phi, Bob with phase chi.
namespace phasemap::protocol {

/// Amplitudes over |a>_A |b>_B, a, b in {1, 2, 3}.
class JointState {
public:
    Complex& at(int alice, int bob) { return amplitudes_[index(alice, bob)]; }
    const Complex& at(int alice, int bob) const { return amplitudes_[index(alice, bob)]; }

    double norm_squared() const;
    JointState normalized() const;

    /// Probability that Bob's atom is found in `level` (partial trace over Alice).
    double bob_population(int level) const;
    double alice_population(int level) const;

    const std::array<Complex, 9>& amplitudes() const { return amplitudes_; }

private:
    static std::size_t index(int alice, int bob);
    std::array<Complex, 9> amplitudes_{};
};

/// |<a|b>|^2 over normalized inputs.
double fidelity(const JointState& a, const JointState& b);

/// (|1>_A |2>_B - |2>_A |1>_B) / sqrt 2.
JointState initial_entangled_state();

/// Weak (RWA) pi pulses on the |2> <-> |3> transition of both atoms; returns
/// the lab-frame state at t_done, after both pulses have finished.
JointState apply_pi_pulses(const JointState& state, const dynamics::DriveField& alice,
                           const dynamics::DriveField& bob, double t_done);

/// Two-component vectors over {|1>, |3>} of one atom.
struct LocalBasis {
    std::array<Complex, 2> plus;
    std::array<Complex, 2> minus;
};

/// The strong-field pi/2 (plus) and 3pi/2 (minus) states at time t, to first
/// order in sigma. `carrier_phase` sets the exp(-i(omega t + phase)) factor
/// on |3>; `sideband_phase` enters Sigma = (i/2) exp(-2i(omega t + phase)).
LocalBasis make_basis(double sigma, double carrier, double carrier_phase, double sideband_phase,
                      double t);

/// Alice's own basis: both phases equal.
LocalBasis make_basis(double sigma, double carrier, double phase, double t);

enum class Mode { exact, sampled, dynamical };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct ProtocolConfig {
    double sigma_strong = 0.05;
    int m = 0;  // g0 = omega / 2m in dynamical mode
    double carrier = 1.0;
    double phi = 0.0;
    double chi = 0.0;
    std::uint64_t pairs = 1;
    Mode mode = Mode::exact;
    std::uint64_t seed = 1;
    double alice_shift = 0.0;
    /// Measurement epoch t = epoch_index * pi / omega.
    std::int64_t epoch_index = 0;
    /// Rabi frequency of the weak pi pulses, in units of omega.
    double weak_rabi = 1e-3;
    dynamics::StepPolicy policy;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned workers = 0;

    void validate() const;

    double strong_rabi() const { return 4.0 * sigma_strong * carrier; }
    double epoch_time() const;
    /// Alice's field phase during the run: phi + alice_shift.
    double alice_phase() const { return phi + alice_shift; }
    /// Phase entering Bob's success probability, omega t + phi + shift.
    double effective_phase() const;
};

/// Counter-seeded splitmix64 stream; one per pair so trial order is irrelevant.
class PairStream {
public:
    using result_type = std::uint64_t;

    PairStream(std::uint64_t seed, std::uint64_t pair_index);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

private:
    std::uint64_t state_;
};

enum class Outcome { plus, minus };

/// Both branches of Alice's measurement, before any sampling.
struct AliceProjection {
    double p_plus = 0.5;
    JointState if_plus;
    JointState if_minus;
};

/// Exact/sampled modes project Alice onto {plus, 1 - plus} of make_basis at
/// time t; dynamical mode runs the pi-shifted strong pulse and detects |1>_A.
AliceProjection alice_projection(const JointState& state, const ProtocolConfig& config, double t);

struct AliceMeasurement {
    Outcome outcome = Outcome::plus;
    JointState collapsed;
};

AliceMeasurement alice_measure(const JointState& state, const ProtocolConfig& config, double t,
                               PairStream& rng);

/// [1 + 2 sigma sin(2 phi_effective)] / 2.
double bob_probability(double sigma, double phi_effective);

/// Born-rule probability of |1>_B in a (renormalized) collapsed state.
double bob_success_probability(const JointState& collapsed);

bool bob_measure(const JointState& collapsed, PairStream& rng);

struct ProtocolReport {
    std::uint64_t pairs = 0;       // X
    std::uint64_t alice_plus = 0;  // M
    std::uint64_t bob_hits = 0;    // L
    double eta = 0.0;
    double stderr_eta = 0.0;
    /// Single-quadrature phase: asin(eta / sigma) / 2 - alice_shift.
    double phi_hat = 0.0;
    /// Bob's per-trial success probability used by the run.
    double bob_probability = 0.5;
    double sigma = 0.0;
    Mode mode = Mode::exact;
    std::uint64_t seed = 0;
    bool degenerate = false;  // M == 0
};

ProtocolReport run_protocol(const ProtocolConfig& config);

struct PhaseEstimate {
    double phase = 0.0;   // in [0, pi)
    double radius = 0.0;  // half-width of the confidence interval
};

/// Two-sided normal quantile used for the confidence radius (99.9 %).
inline constexpr double kConfidenceZ = 3.2905;

/// phi mod pi from the sine run (shift 0) and cosine run (shift pi/4).
PhaseEstimate estimate_phase(double eta_sin, double eta_cos, double sigma,
                             std::uint64_t m_sin, std::uint64_t m_cos);

/// Shortest signed distance between two phases modulo pi.
double phase_distance_mod_pi(double a, double b);

std::string to_key_value(const ProtocolReport& report);
std::string csv_header();
std::string csv_row(const ProtocolReport& report);

}  // namespace phasemap::protocol
