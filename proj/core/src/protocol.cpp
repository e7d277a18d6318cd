#include "phasemap/protocol.hpp"

#include "phasemap/csv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

namespace phasemap::protocol {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kSupportTolerance = 1e-12;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::array<Complex, 2> normalized(const std::array<Complex, 2>& v)
{
    const double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
    return {v[0] / n, v[1] / n};
}

void require_alice_support_13(const JointState& state)
{
    for (int b = 1; b <= 3; ++b) {
        if (std::abs(state.at(2, b)) > kSupportTolerance) {
            throw ContractViolation("Alice's atom must be supported on |1>, |3> (post-pulse form)");
        }
    }
}

JointState scaled(const JointState& s, double factor)
{
    JointState out;
    for (int a = 1; a <= 3; ++a) {
        for (int b = 1; b <= 3; ++b) out.at(a, b) = factor * s.at(a, b);
    }
    return out;
}

}  // namespace

std::size_t JointState::index(int alice, int bob)
{
    if (alice < 1 || alice > 3 || bob < 1 || bob > 3) {
        throw ContractViolation("atomic level index must be 1, 2 or 3");
    }
    return static_cast<std::size_t>((alice - 1) * 3 + (bob - 1));
}

double JointState::norm_squared() const
{
    double n = 0.0;
    for (const auto& c : amplitudes_) n += std::norm(c);
    return n;
}

JointState JointState::normalized() const
{
    const double n = norm_squared();
    if (n <= 0.0) throw ContractViolation("cannot normalize a zero state");
    return scaled(*this, 1.0 / std::sqrt(n));
}

double JointState::bob_population(int level) const
{
    double p = 0.0;
    for (int a = 1; a <= 3; ++a) p += std::norm(at(a, level));
    return p / norm_squared();
}

double JointState::alice_population(int level) const
{
    double p = 0.0;
    for (int b = 1; b <= 3; ++b) p += std::norm(at(level, b));
    return p / norm_squared();
}

double fidelity(const JointState& a, const JointState& b)
{
    Complex overlap{};
    for (std::size_t i = 0; i < 9; ++i) overlap += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
    return std::norm(overlap) / (a.norm_squared() * b.norm_squared());
}

JointState initial_entangled_state()
{
    JointState s;
    s.at(1, 2) = std::numbers::sqrt2 / 2.0;
    s.at(2, 1) = -std::numbers::sqrt2 / 2.0;
    return s;
}

JointState apply_pi_pulses(const JointState& state, const dynamics::DriveField& alice,
                           const dynamics::DriveField& bob, double t_done)
{
    alice.validate();
    bob.validate();
    if (!alice.rwa || !bob.rwa) {
        throw ContractViolation("pi pulses use attenuated (RWA) fields");
    }
    for (int a = 1; a <= 3; ++a) {
        for (int b = 1; b <= 3; ++b) {
            if ((a == 3 || b == 3) && std::abs(state.at(a, b)) > kSupportTolerance) {
                throw ContractViolation("pi pulses expect a state supported on levels {1, 2}");
            }
        }
    }
    // An RWA pi pulse maps |2> to i exp(-i(omega t + phase)) |3> in the lab frame;
    // free evolution afterwards keeps that form for every later t.
    const Complex to_upper_a = kI * std::exp(-kI * (alice.carrier * t_done + alice.phase));
    const Complex to_upper_b = kI * std::exp(-kI * (bob.carrier * t_done + bob.phase));

    JointState out;
    for (int a = 1; a <= 2; ++a) {
        for (int b = 1; b <= 2; ++b) {
            const int a_out = a == 2 ? 3 : a;
            const int b_out = b == 2 ? 3 : b;
            const Complex fa = a == 2 ? to_upper_a : Complex{1.0, 0.0};
            const Complex fb = b == 2 ? to_upper_b : Complex{1.0, 0.0};
            out.at(a_out, b_out) = fa * fb * state.at(a, b);
        }
    }
    return out;
}

LocalBasis make_basis(double sigma, double carrier, double carrier_phase, double sideband_phase,
                      double t)
{
    if (sigma < 0.0) throw ContractViolation("sigma must be non-negative");
    const Complex big_sigma = 0.5 * kI * std::exp(-2.0 * kI * (carrier * t + sideband_phase));
    const Complex upper = kI * std::exp(-kI * (carrier * t + carrier_phase));
    const double r = std::numbers::sqrt2 / 2.0;
    LocalBasis basis;
    basis.plus = {r * (1.0 - 2.0 * sigma * big_sigma),
                  r * upper * (1.0 + 2.0 * sigma * std::conj(big_sigma))};
    basis.minus = {r * (1.0 + 2.0 * sigma * big_sigma),
                   -r * upper * (1.0 - 2.0 * sigma * std::conj(big_sigma))};
    return basis;
}

LocalBasis make_basis(double sigma, double carrier, double phase, double t)
{
    return make_basis(sigma, carrier, phase, phase, t);
}

std::string to_string(Mode mode)
{
    switch (mode) {
        case Mode::exact: return "exact";
        case Mode::sampled: return "sampled";
        case Mode::dynamical: return "dynamical";
    }
    return "exact";
}

Mode mode_from_string(const std::string& name)
{
    if (name == "exact") return Mode::exact;
    if (name == "sampled") return Mode::sampled;
    if (name == "dynamical") return Mode::dynamical;
    throw ConfigurationError("unknown protocol mode '" + name + "'");
}

void ProtocolConfig::validate() const
{
    if (!std::isfinite(sigma_strong) || sigma_strong < 0.0) {
        throw ConfigurationError("sigma_strong must be finite and non-negative");
    }
    if (!(carrier > 0.0) || !std::isfinite(carrier)) {
        throw ConfigurationError("carrier frequency must be positive");
    }
    if (!std::isfinite(phi) || !std::isfinite(chi) || !std::isfinite(alice_shift)) {
        throw ConfigurationError("phases must be finite");
    }
    if (pairs < 1) throw ConfigurationError("at least one entangled pair is required");
    if (!(weak_rabi > 0.0)) throw ConfigurationError("weak_rabi must be positive");
    policy.validate();
    if (mode == Mode::dynamical) {
        if (m < 1) throw ConfigurationError("dynamical mode needs an integer m >= 1");
        // g0 = omega / 2m  <=>  sigma = 1 / 8m
        const double tuned = 1.0 / (8.0 * m);
        if (std::abs(sigma_strong - tuned) > 1e-12 * tuned) {
            throw ConfigurationError("dynamical mode requires g0 = omega / 2m (sigma_strong = 1/8m)");
        }
    }
}

double ProtocolConfig::epoch_time() const
{
    return static_cast<double>(epoch_index) * std::numbers::pi / carrier;
}

double ProtocolConfig::effective_phase() const
{
    return carrier * epoch_time() + alice_phase();
}

PairStream::PairStream(std::uint64_t seed, std::uint64_t pair_index)
    : state_(splitmix64(seed ^ splitmix64(pair_index)))
{
}

PairStream::result_type PairStream::operator()()
{
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double PairStream::uniform()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

AliceProjection alice_projection(const JointState& state, const ProtocolConfig& config, double t)
{
    config.validate();
    require_alice_support_13(state);
    const JointState psi = state.normalized();
    AliceProjection out;

    if (config.mode == Mode::dynamical) {
        // (i) shift by pi, (ii) g0 = omega/2m, (iii) T = pi / 2 g0, (iv) detect |1>_A.
        const double g0 = config.strong_rabi();
        const double duration = std::numbers::pi / (2.0 * g0);
        const dynamics::DriveField strong{g0, config.carrier,
                                          config.alice_phase() + std::numbers::pi, false};
        const dynamics::Matrix2 u =
            dynamics::propagator(strong, t, t + duration, dynamics::Frame::lab, config.policy);
        const Complex bob_free = std::exp(-kI * config.carrier * duration);
        JointState after;
        for (int b = 1; b <= 3; ++b) {
            const Complex fb = b == 3 ? bob_free : Complex{1.0, 0.0};
            after.at(1, b) = fb * (u[0][0] * psi.at(1, b) + u[0][1] * psi.at(3, b));
            after.at(3, b) = fb * (u[1][0] * psi.at(1, b) + u[1][1] * psi.at(3, b));
        }
        JointState plus_part;
        JointState minus_part;
        for (int b = 1; b <= 3; ++b) {
            plus_part.at(1, b) = after.at(1, b);
            minus_part.at(3, b) = after.at(3, b);
        }
        out.p_plus = plus_part.norm_squared() / after.norm_squared();
        if (out.p_plus > 0.0) out.if_plus = plus_part.normalized();
        if (out.p_plus < 1.0) out.if_minus = minus_part.normalized();
        return out;
    }

    const auto plus =
        normalized(make_basis(config.sigma_strong, config.carrier, config.alice_phase(), t).plus);
    JointState plus_part;
    for (int b = 1; b <= 3; ++b) {
        const Complex c = std::conj(plus[0]) * psi.at(1, b) + std::conj(plus[1]) * psi.at(3, b);
        plus_part.at(1, b) = plus[0] * c;
        plus_part.at(3, b) = plus[1] * c;
    }
    JointState minus_part;
    for (int a = 1; a <= 3; ++a) {
        for (int b = 1; b <= 3; ++b) minus_part.at(a, b) = psi.at(a, b) - plus_part.at(a, b);
    }
    const double p_plus = plus_part.norm_squared();
    out.p_plus = config.mode == Mode::exact ? 0.5 : p_plus;
    if (p_plus > 0.0) out.if_plus = plus_part.normalized();
    if (p_plus < 1.0) out.if_minus = minus_part.normalized();
    return out;
}

AliceMeasurement alice_measure(const JointState& state, const ProtocolConfig& config, double t,
                               PairStream& rng)
{
    const AliceProjection projection = alice_projection(state, config, t);
    if (rng.uniform() < projection.p_plus) return {Outcome::plus, projection.if_plus};
    return {Outcome::minus, projection.if_minus};
}

double bob_probability(double sigma, double phi_effective)
{
    if (sigma < 0.0) throw ContractViolation("sigma must be non-negative");
    return 0.5 * (1.0 + 2.0 * sigma * std::sin(2.0 * phi_effective));
}

double bob_success_probability(const JointState& collapsed)
{
    return collapsed.bob_population(1);
}

bool bob_measure(const JointState& collapsed, PairStream& rng)
{
    return rng.uniform() < bob_success_probability(collapsed);
}

namespace {

struct Counts {
    std::uint64_t alice_plus = 0;
    std::uint64_t bob_hits = 0;
};

Counts sample_range(std::uint64_t seed, std::uint64_t begin, std::uint64_t end, double p_plus,
                    double p_bob)
{
    Counts c;
    for (std::uint64_t i = begin; i < end; ++i) {
        PairStream rng(seed, i);
        if (rng.uniform() < p_plus) {
            ++c.alice_plus;
            if (rng.uniform() < p_bob) ++c.bob_hits;
        }
    }
    return c;
}

Counts sample_pairs(const ProtocolConfig& config, double p_plus, double p_bob)
{
    unsigned workers = config.workers != 0 ? config.workers : std::thread::hardware_concurrency();
    workers = std::max(1U, workers);
    const std::uint64_t chunk = std::max<std::uint64_t>(1, config.pairs / workers + 1);
    if (workers == 1 || config.pairs < 100000) {
        return sample_range(config.seed, 0, config.pairs, p_plus, p_bob);
    }
    std::vector<Counts> partial(workers);
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t begin = std::min(config.pairs, w * chunk);
        const std::uint64_t end = std::min(config.pairs, begin + chunk);
        threads.emplace_back([&, w, begin, end] {
            partial[w] = sample_range(config.seed, begin, end, p_plus, p_bob);
        });
    }
    for (auto& th : threads) th.join();
    Counts total;
    for (const auto& c : partial) {
        total.alice_plus += c.alice_plus;
        total.bob_hits += c.bob_hits;
    }
    return total;
}

double single_quadrature_phase(double eta, double sigma, double shift)
{
    if (!(sigma > 0.0) || !std::isfinite(eta)) return std::numeric_limits<double>::quiet_NaN();
    const double raw = 0.5 * std::asin(std::clamp(eta / sigma, -1.0, 1.0)) - shift;
    const double reduced = std::fmod(raw, std::numbers::pi);
    return reduced < 0.0 ? reduced + std::numbers::pi : reduced;
}

}  // namespace

ProtocolReport run_protocol(const ProtocolConfig& config)
{
    config.validate();
    ProtocolReport report;
    report.pairs = config.pairs;
    report.mode = config.mode;
    report.seed = config.seed;
    report.sigma = config.sigma_strong;

    if (config.mode == Mode::exact) {
        const double expected_m = 0.5 * static_cast<double>(config.pairs);
        report.bob_probability = bob_probability(config.sigma_strong, config.effective_phase());
        report.alice_plus = config.pairs / 2;
        report.bob_hits = static_cast<std::uint64_t>(
            std::llround(report.bob_probability * static_cast<double>(report.alice_plus)));
        report.eta = config.sigma_strong * std::sin(2.0 * config.effective_phase());
        report.stderr_eta = 0.5 / std::sqrt(expected_m);
        report.phi_hat =
            single_quadrature_phase(report.eta, config.sigma_strong, config.alice_shift);
        return report;
    }

    const double t = config.epoch_time();
    const dynamics::DriveField alice_weak{config.weak_rabi * config.carrier, config.carrier,
                                          config.alice_phase(), true};
    const dynamics::DriveField bob_weak{config.weak_rabi * config.carrier, config.carrier,
                                        config.chi, true};
    const JointState entangled =
        apply_pi_pulses(initial_entangled_state(), alice_weak, bob_weak, t);
    const AliceProjection projection = alice_projection(entangled, config, t);
    report.bob_probability = bob_success_probability(projection.if_plus);

    const Counts counts = sample_pairs(config, projection.p_plus, report.bob_probability);
    report.alice_plus = counts.alice_plus;
    report.bob_hits = counts.bob_hits;
    if (report.alice_plus == 0) {
        report.degenerate = true;
        report.eta = std::numeric_limits<double>::quiet_NaN();
        report.stderr_eta = std::numeric_limits<double>::infinity();
        report.phi_hat = std::numeric_limits<double>::quiet_NaN();
        return report;
    }
    const double m = static_cast<double>(report.alice_plus);
    report.eta = static_cast<double>(report.bob_hits) / m - 0.5;
    report.stderr_eta = 0.5 / std::sqrt(m);
    report.phi_hat = single_quadrature_phase(report.eta, config.sigma_strong, config.alice_shift);
    return report;
}

PhaseEstimate estimate_phase(double eta_sin, double eta_cos, double sigma, std::uint64_t m_sin,
                             std::uint64_t m_cos)
{
    if (!(sigma > 0.0)) throw ContractViolation("phase recovery needs sigma > 0");
    if (m_sin == 0 || m_cos == 0) throw IndeterminatePhase("a quadrature run had M = 0");
    const double sd_sin = 0.5 / std::sqrt(static_cast<double>(m_sin));
    const double sd_cos = 0.5 / std::sqrt(static_cast<double>(m_cos));
    const double s = eta_sin / sigma;
    const double c = eta_cos / sigma;
    const double r2 = s * s + c * c;
    const double noise = std::max(sd_sin, sd_cos) / sigma;
    if (std::sqrt(r2) < kConfidenceZ * noise) {
        throw IndeterminatePhase("both quadratures are within noise of zero");
    }
    double phase = 0.5 * std::atan2(s, c);
    if (phase < 0.0) phase += std::numbers::pi;
    if (phase >= std::numbers::pi) phase -= std::numbers::pi;
    // phi = atan2(s, c) / 2: gradient (c, -s) / (2 r^2)
    const double sd_phase =
        0.5 * std::sqrt(c * c * sd_sin * sd_sin + s * s * sd_cos * sd_cos) / (sigma * r2);
    return {phase, kConfidenceZ * sd_phase};
}

double phase_distance_mod_pi(double a, double b)
{
    double d = std::fmod(a - b, std::numbers::pi);
    if (d > 0.5 * std::numbers::pi) d -= std::numbers::pi;
    if (d < -0.5 * std::numbers::pi) d += std::numbers::pi;
    return d;
}

std::string to_key_value(const ProtocolReport& r)
{
    std::ostringstream os;
    os << "pairs = " << r.pairs << '\n'
       << "alice_plus = " << r.alice_plus << '\n'
       << "bob_hits = " << r.bob_hits << '\n'
       << "eta = " << format_double(r.eta) << '\n'
       << "stderr = " << format_double(r.stderr_eta) << '\n'
       << "phi_hat = " << format_double(r.phi_hat) << '\n'
       << "bob_probability = " << format_double(r.bob_probability) << '\n'
       << "sigma = " << format_double(r.sigma) << '\n'
       << "mode = " << to_string(r.mode) << '\n'
       << "seed = " << r.seed << '\n'
       << "degenerate = " << (r.degenerate ? "true" : "false") << '\n';
    return os.str();
}

std::string csv_header() { return "X,M,L,eta,stderr,phi_hat"; }

std::string csv_row(const ProtocolReport& r)
{
    std::ostringstream os;
    os << r.pairs << ',' << r.alice_plus << ',' << r.bob_hits << ',' << format_double(r.eta) << ','
       << format_double(r.stderr_eta) << ',' << format_double(r.phi_hat);
    return os.str();
}

}  // namespace phasemap::protocol
