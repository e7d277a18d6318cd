#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "phasemap/config.hpp"
#include "phasemap/dynamics.hpp"
#include "phasemap/floquet.hpp"
#include "phasemap/protocol.hpp"

namespace phasemap::scenario {

enum class Scenario { rabi, fig3, reversal, signal, protocol, estimate };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

inline constexpr const char* kVersion = "0.1.0";

struct ScenarioConfig {
    Scenario scenario = Scenario::rabi;

    // Drive. Either sigma or rabi is given; g0 = 4 sigma omega.
    double sigma = 0.05;
    double carrier = 1.0;
    double phi = 0.0;
    double chi = 0.0;
    bool rwa = false;
    int steps_per_period = 200;

    // rabi
    double rabi_periods = 2.0;
    int samples = 400;

    // fig3
    double ramp_periods = 50.0;
    double hold_rabi_periods = 2.0;
    int stride = 10;
    std::string trajectory_path;

    // reversal
    std::vector<int> m_list{1, 2, 3, 5};

    // signal
    int points = 32;
    double probe_ramp = -1.0;  // negative: shortest adiabatic ramp

    // protocol / estimate
    int m = 0;
    std::uint64_t pairs = 1000000;
    protocol::Mode mode = protocol::Mode::exact;
    std::uint64_t seed = 1;
    double alice_shift = 0.0;
    double cos_shift = 0.7853981633974483;
    std::int64_t epoch_index = 0;
    int reps = 1;
    unsigned workers = 0;

    std::string out = "phasemap.csv";

    static ScenarioConfig from(const KeyValueConfig& kv);
    /// Every key, so the echo alone reproduces the run.
    KeyValueConfig echo() const;
    /// Runs the owning modules' precondition checks.
    void validate() const;

    double rabi() const { return 4.0 * sigma * carrier; }
    dynamics::DriveField field() const { return {rabi(), carrier, phi, rwa}; }
    dynamics::StepPolicy policy() const { return {steps_per_period}; }
    protocol::ProtocolConfig protocol_config() const;
};

struct OutputDigest {
    std::string path;
    std::string sha256;
};

struct RunManifest {
    KeyValueConfig config;
    std::string version = kVersion;
    double wall_seconds = 0.0;
    std::vector<OutputDigest> outputs;
    /// Scenario-specific summary values (fit results, coverage counts...).
    std::vector<std::pair<std::string, std::string>> summary;

    std::string to_text() const;
};

/// fig3 columns: t, g0/omega, |b0|^2, sigma^2 |b0|^2, |a1|^2.
void emit_fig3_csv(const floquet::Trajectory& trajectory, double carrier, std::ostream& out);
/// t, re/im of the six sideband amplitudes, g0.
void emit_trajectory_csv(const floquet::Trajectory& trajectory, std::ostream& out);
/// X, M, L, eta, stderr, phi_hat.
void emit_report_csv(const protocol::ProtocolReport& report, std::ostream& out);

/// Writes the scenario's CSV (and side files) and `<out>.manifest`.
RunManifest run_scenario(const ScenarioConfig& config);

std::string sha256_file(const std::string& path);

}  // namespace phasemap::scenario
