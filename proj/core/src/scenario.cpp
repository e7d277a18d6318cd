#include "phasemap/scenario.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "phasemap/csv.hpp"
#include "phasemap/errors.hpp"

namespace phasemap::scenario {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" ", used) != std::string::npos) {
            throw ConfigurationError("invalid m_list entry '" + item + "'");
        }
        out.push_back(value);
    }
    return out;
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open output file '" + path + "'");
    return out;
}

void close_output(std::ofstream& out, const std::string& path)
{
    out.flush();
    if (!out) throw OutputError("failed writing '" + path + "'");
    out.close();
}

std::string digits(double x) { return format_double(x); }

void run_rabi(const ScenarioConfig& cfg, RunManifest& manifest)
{
    const auto field = cfg.field();
    if (field.rabi <= 0.0) throw ConfigurationError("rabi scenario needs g0 > 0");
    const double t_end = cfg.rabi_periods * 2.0 * kPi / field.rabi;
    auto out = open_output(cfg.out);
    CsvWriter csv(out, {"t [1/omega]", "|C1|^2", "|C3|^2", "sin^2(g0 t/2)", "norm"});
    // Populations are frame independent; the rotating frame keeps the RWA
    // Hamiltonian constant and the step error small.
    dynamics::TwoLevelState state{1.0, 0.0, dynamics::Frame::rotating};
    double t = 0.0;
    double worst_rwa = 0.0;
    const auto emit = [&] {
        const double closed = std::pow(std::sin(0.5 * field.rabi * t), 2);
        csv.row({t, std::norm(state.lower), std::norm(state.upper), closed, state.norm_squared()});
        worst_rwa = std::max(worst_rwa, std::abs(std::norm(state.upper) - closed));
    };
    emit();
    for (int k = 1; k <= cfg.samples; ++k) {
        const double next = t_end * k / cfg.samples;
        state = dynamics::evolve(state, field, t, next, cfg.policy());
        t = next;
        emit();
    }
    close_output(out, cfg.out);
    manifest.summary.emplace_back("max_abs_upper_minus_sin2", digits(worst_rwa));
    manifest.summary.emplace_back("sigma_warning", field.perturbative_warning() ? "true" : "false");
}

void run_fig3(const ScenarioConfig& cfg, RunManifest& manifest)
{
    const floquet::RampProfile ramp{cfg.rabi(), cfg.ramp_periods};
    const double t_end =
        ramp.rise_time(cfg.carrier) + cfg.hold_rabi_periods * 2.0 * kPi / std::max(cfg.rabi(), 1e-300);
    const auto traj = floquet::integrate_truncated(floquet::FloquetAmplitudes{}, ramp, cfg.carrier,
                                                   0.0, t_end, cfg.policy(),
                                                   static_cast<std::size_t>(cfg.stride));
    auto out = open_output(cfg.out);
    emit_fig3_csv(traj, cfg.carrier, out);
    close_output(out, cfg.out);

    double worst_a1 = 0.0;
    double worst_bm1 = 0.0;
    for (const auto& s : traj.samples) {
        const double sigma = s.rabi / (4.0 * cfg.carrier);
        const auto& f = s.amplitudes;
        worst_a1 = std::max(worst_a1, std::abs(std::norm(f.a_1) - sigma * sigma * std::norm(f.b_0)));
        worst_bm1 =
            std::max(worst_bm1, std::abs(std::norm(f.b_m1) - sigma * sigma * std::norm(f.a_0)));
    }

    if (!cfg.trajectory_path.empty()) {
        auto tout = open_output(cfg.trajectory_path);
        emit_trajectory_csv(traj, tout);
        close_output(tout, cfg.trajectory_path);
        manifest.outputs.push_back({cfg.trajectory_path, sha256_file(cfg.trajectory_path)});
    }
    const double sp2 = cfg.sigma * cfg.sigma;
    manifest.summary.emplace_back("max_dev_a1_over_sigma2", digits(sp2 > 0 ? worst_a1 / sp2 : 0.0));
    manifest.summary.emplace_back("max_dev_bm1_over_sigma2",
                                  digits(sp2 > 0 ? worst_bm1 / sp2 : 0.0));
    for (const auto& w : traj.warnings) manifest.summary.emplace_back("warning", w);
}

void run_reversal(const ScenarioConfig& cfg, RunManifest& manifest)
{
    const auto field = cfg.field();
    auto out = open_output(cfg.out);
    CsvWriter csv(out, {"T [pi/omega]", "on_grid", "infidelity"});
    const dynamics::TwoLevelState start{1.0, 0.0, dynamics::Frame::lab};
    for (const int m : cfg.m_list) {
        for (const double frac : {0.0, 0.25}) {
            const double multiple = m + frac;
            const double duration = multiple * kPi / cfg.carrier;
            const auto forward = dynamics::evolve(start, field, 0.0, duration, cfg.policy());
            const auto back =
                dynamics::time_reverse(forward, field, duration, duration, cfg.policy());
            csv.row({multiple, frac == 0.0 ? 1.0 : 0.0, 1.0 - dynamics::fidelity(start, back)});
        }
    }
    close_output(out, cfg.out);
    manifest.summary.emplace_back("sigma_warning", field.perturbative_warning() ? "true" : "false");
}

void run_signal(const ScenarioConfig& cfg, RunManifest& manifest)
{
    const double ramp =
        cfg.probe_ramp < 0.0 ? dynamics::minimum_adiabatic_ramp(cfg.carrier) : cfg.probe_ramp;
    auto out = open_output(cfg.out);
    CsvWriter csv(out, {"phi [rad]", "tau [1/omega]", "P1 integrated", "P1 signal formula"});
    std::vector<double> phases;
    std::vector<double> populations;
    for (int k = 0; k < cfg.points; ++k) {
        const double phi = kPi * k / cfg.points;
        const auto field = cfg.field().with_phase(phi);
        const double tau = dynamics::shaped_pulse_duration(field, 0.5 * kPi, ramp);
        const auto state = dynamics::shaped_pulse({1.0, 0.0, dynamics::Frame::lab}, field,
                                                  0.5 * kPi, 0.0, ramp, cfg.policy());
        const double p1 = dynamics::population(state, dynamics::Level::lower);
        csv.row({phi, tau, p1, floquet::signal(tau, field.rabi, cfg.carrier, phi)});
        phases.push_back(phi);
        populations.push_back(p1);
    }
    close_output(out, cfg.out);
    const auto fit = floquet::fit_double_phase_sinusoid(phases, populations);
    manifest.summary.emplace_back("fit_amplitude", digits(fit.amplitude));
    manifest.summary.emplace_back("fit_amplitude_over_sigma",
                                  digits(cfg.sigma > 0 ? fit.amplitude / cfg.sigma : 0.0));
    manifest.summary.emplace_back("fit_offset", digits(fit.offset));
    manifest.summary.emplace_back("fit_baseline", digits(fit.baseline));
}

void run_protocol_scenario(const ScenarioConfig& cfg, RunManifest& manifest)
{
    const auto report = protocol::run_protocol(cfg.protocol_config());
    auto out = open_output(cfg.out);
    emit_report_csv(report, out);
    close_output(out, cfg.out);

    const std::string record = cfg.out + ".report";
    auto rout = open_output(record);
    rout << protocol::to_key_value(report);
    close_output(rout, record);
    manifest.outputs.push_back({record, sha256_file(record)});
    manifest.summary.emplace_back("eta", digits(report.eta));
    manifest.summary.emplace_back("degenerate", report.degenerate ? "true" : "false");
}

void run_estimate(const ScenarioConfig& cfg, RunManifest& manifest)
{
    auto out = open_output(cfg.out);
    CsvWriter csv(out, {"rep", "seed_sin", "seed_cos", "eta_sin", "eta_cos", "M_sin", "M_cos",
                        "phi_hat", "radius", "phi_mod_pi", "covered"});
    int covered = 0;
    const double truth = std::fmod(std::fmod(cfg.phi, kPi) + kPi, kPi);
    for (int r = 0; r < cfg.reps; ++r) {
        auto sin_run = cfg.protocol_config();
        sin_run.alice_shift = 0.0;
        sin_run.seed = cfg.seed + 2ULL * static_cast<std::uint64_t>(r);
        auto cos_run = sin_run;
        cos_run.alice_shift = cfg.cos_shift;
        cos_run.seed = sin_run.seed + 1;
        const auto rs = protocol::run_protocol(sin_run);
        const auto rc = protocol::run_protocol(cos_run);
        const auto est =
            protocol::estimate_phase(rs.eta, rc.eta, cfg.sigma, rs.alice_plus, rc.alice_plus);
        const bool hit = std::abs(protocol::phase_distance_mod_pi(est.phase, truth)) <= est.radius;
        covered += hit ? 1 : 0;
        csv.row({static_cast<double>(r), static_cast<double>(sin_run.seed),
                 static_cast<double>(cos_run.seed), rs.eta, rc.eta,
                 static_cast<double>(rs.alice_plus), static_cast<double>(rc.alice_plus), est.phase,
                 est.radius, truth, hit ? 1.0 : 0.0});
    }
    close_output(out, cfg.out);
    manifest.summary.emplace_back("covered", std::to_string(covered));
    manifest.summary.emplace_back("reps", std::to_string(cfg.reps));
}

}  // namespace

void emit_fig3_csv(const floquet::Trajectory& trajectory, double carrier, std::ostream& out)
{
    CsvWriter csv(out, {"t [1/omega]", "g0/omega", "|b0|^2", "sigma^2*|b0|^2", "|a1|^2"});
    for (const auto& s : trajectory.samples) {
        const double sigma = s.rabi / (4.0 * carrier);
        const auto& f = s.amplitudes;
        csv.row({s.t, s.rabi / carrier, std::norm(f.b_0), sigma * sigma * std::norm(f.b_0),
                 std::norm(f.a_1)});
    }
}

void emit_trajectory_csv(const floquet::Trajectory& trajectory, std::ostream& out)
{
    CsvWriter csv(out, {"t [1/omega]", "re a_-1", "im a_-1", "re b_-1", "im b_-1", "re a_0",
                        "im a_0", "re b_0", "im b_0", "re a_1", "im a_1", "re b_1", "im b_1",
                        "g0 [omega]"});
    for (const auto& s : trajectory.samples) {
        const auto& f = s.amplitudes;
        csv.row({s.t, f.a_m1.real(), f.a_m1.imag(), f.b_m1.real(), f.b_m1.imag(), f.a_0.real(),
                 f.a_0.imag(), f.b_0.real(), f.b_0.imag(), f.a_1.real(), f.a_1.imag(),
                 f.b_1.real(), f.b_1.imag(), s.rabi});
    }
}

void emit_report_csv(const protocol::ProtocolReport& report, std::ostream& out)
{
    CsvWriter csv(out, {"X", "M", "L", "eta", "stderr", "phi_hat"});
    csv.raw_row(protocol::csv_row(report));
}

std::string to_string(Scenario s)
{
    switch (s) {
        case Scenario::rabi: return "rabi";
        case Scenario::fig3: return "fig3";
        case Scenario::reversal: return "reversal";
        case Scenario::signal: return "signal";
        case Scenario::protocol: return "protocol";
        case Scenario::estimate: return "estimate";
    }
    return "rabi";
}

Scenario scenario_from_string(const std::string& name)
{
    for (const Scenario s : {Scenario::rabi, Scenario::fig3, Scenario::reversal, Scenario::signal,
                             Scenario::protocol, Scenario::estimate}) {
        if (to_string(s) == name) return s;
    }
    throw ConfigurationError("unknown scenario '" + name + "'");
}

ScenarioConfig ScenarioConfig::from(const KeyValueConfig& kv)
{
    ScenarioConfig c;
    c.scenario = scenario_from_string(kv.get_string("scenario", to_string(c.scenario)));
    c.carrier = kv.get_double("carrier", c.carrier);
    if (kv.contains("rabi") && kv.contains("sigma")) {
        throw ConfigurationError("give either 'rabi' or 'sigma', not both");
    }
    c.sigma = kv.contains("rabi") ? kv.get_double("rabi", 0.0) / (4.0 * c.carrier)
                                  : kv.get_double("sigma", c.sigma);
    c.phi = kv.get_double("phi", c.phi);
    c.chi = kv.get_double("chi", c.chi);
    c.rwa = kv.get_bool("rwa", c.rwa);
    c.steps_per_period = static_cast<int>(kv.get_int("steps_per_period", c.steps_per_period));
    c.rabi_periods = kv.get_double("rabi_periods", c.rabi_periods);
    c.samples = static_cast<int>(kv.get_int("samples", c.samples));
    c.ramp_periods = kv.get_double("ramp_periods", c.ramp_periods);
    c.hold_rabi_periods = kv.get_double("hold_rabi_periods", c.hold_rabi_periods);
    c.stride = static_cast<int>(kv.get_int("stride", c.stride));
    c.trajectory_path = kv.get_string("trajectory", c.trajectory_path);
    if (kv.contains("m_list")) c.m_list = parse_int_list(kv.get_string("m_list", ""));
    c.points = static_cast<int>(kv.get_int("points", c.points));
    c.probe_ramp = kv.get_double("probe_ramp", c.probe_ramp);
    c.m = static_cast<int>(kv.get_int("m", c.m));
    c.pairs = kv.get_uint("pairs", c.pairs);
    c.mode = protocol::mode_from_string(kv.get_string("mode", protocol::to_string(c.mode)));
    c.seed = kv.get_uint("seed", c.seed);
    c.alice_shift = kv.get_double("alice_shift", c.alice_shift);
    c.cos_shift = kv.get_double("cos_shift", c.cos_shift);
    c.epoch_index = kv.get_int("epoch_index", c.epoch_index);
    c.reps = static_cast<int>(kv.get_int("reps", c.reps));
    c.workers = static_cast<unsigned>(kv.get_uint("workers", c.workers));
    c.out = kv.get_string("out", c.out);
    return c;
}

KeyValueConfig ScenarioConfig::echo() const
{
    KeyValueConfig kv;
    std::string ms;
    for (std::size_t i = 0; i < m_list.size(); ++i) ms += (i ? "," : "") + std::to_string(m_list[i]);
    kv.set("scenario", to_string(scenario));
    kv.set("sigma", digits(sigma));
    kv.set("carrier", digits(carrier));
    kv.set("phi", digits(phi));
    kv.set("chi", digits(chi));
    kv.set("rwa", rwa ? "true" : "false");
    kv.set("steps_per_period", std::to_string(steps_per_period));
    kv.set("rabi_periods", digits(rabi_periods));
    kv.set("samples", std::to_string(samples));
    kv.set("ramp_periods", digits(ramp_periods));
    kv.set("hold_rabi_periods", digits(hold_rabi_periods));
    kv.set("stride", std::to_string(stride));
    if (!trajectory_path.empty()) kv.set("trajectory", trajectory_path);
    kv.set("m_list", ms);
    kv.set("points", std::to_string(points));
    kv.set("probe_ramp", digits(probe_ramp));
    kv.set("m", std::to_string(m));
    kv.set("pairs", std::to_string(pairs));
    kv.set("mode", protocol::to_string(mode));
    kv.set("seed", std::to_string(seed));
    kv.set("alice_shift", digits(alice_shift));
    kv.set("cos_shift", digits(cos_shift));
    kv.set("epoch_index", std::to_string(epoch_index));
    kv.set("reps", std::to_string(reps));
    kv.set("workers", std::to_string(workers));
    kv.set("out", out);
    return kv;
}

void ScenarioConfig::validate() const
{
    if (!std::isfinite(sigma) || sigma < 0.0) throw ConfigurationError("sigma must be >= 0");
    field().validate();
    policy().validate();
    if (out.empty()) throw ConfigurationError("an output path is required");
    switch (scenario) {
        case Scenario::rabi:
            if (!(rabi_periods > 0.0) || samples < 1) {
                throw ConfigurationError("rabi needs rabi_periods > 0 and samples >= 1");
            }
            if (sigma <= 0.0) throw ConfigurationError("rabi scenario needs sigma > 0");
            break;
        case Scenario::fig3:
            if (ramp_periods < 0.0 || hold_rabi_periods < 0.0 || stride < 1) {
                throw ConfigurationError("fig3 needs ramp_periods, hold_rabi_periods >= 0, stride >= 1");
            }
            if (sigma <= 0.0) throw ConfigurationError("fig3 scenario needs sigma > 0");
            break;
        case Scenario::reversal:
            if (m_list.empty()) throw ConfigurationError("reversal needs a non-empty m_list");
            for (const int m_value : m_list) {
                if (m_value < 1) throw ConfigurationError("m_list entries must be >= 1");
            }
            break;
        case Scenario::signal: {
            if (points < 3) throw ConfigurationError("signal needs points >= 3");
            if (sigma <= 0.0) throw ConfigurationError("signal scenario needs sigma > 0");
            const double ramp =
                probe_ramp < 0.0 ? dynamics::minimum_adiabatic_ramp(carrier) : probe_ramp;
            dynamics::shaped_pulse_duration(field(), 0.5 * std::numbers::pi, ramp);
            break;
        }
        case Scenario::protocol:
            protocol_config().validate();
            break;
        case Scenario::estimate:
            protocol_config().validate();
            if (reps < 1) throw ConfigurationError("estimate needs reps >= 1");
            if (mode == protocol::Mode::exact) {
                throw ConfigurationError("estimate needs a sampling mode (sampled or dynamical)");
            }
            if (sigma <= 0.0) throw ConfigurationError("estimate scenario needs sigma > 0");
            break;
    }
}

protocol::ProtocolConfig ScenarioConfig::protocol_config() const
{
    protocol::ProtocolConfig p;
    p.sigma_strong = sigma;
    p.m = m;
    p.carrier = carrier;
    p.phi = phi;
    p.chi = chi;
    p.pairs = pairs;
    p.mode = mode;
    p.seed = seed;
    p.alice_shift = alice_shift;
    p.epoch_index = epoch_index;
    p.policy = policy();
    p.workers = workers;
    return p;
}

std::string RunManifest::to_text() const
{
    std::ostringstream os;
    os << "# run manifest\n"
       << "version = " << version << '\n'
       << "wall_seconds = " << std::setprecision(6) << wall_seconds << '\n';
    os << "[config]\n" << config.to_text();
    os << "[outputs]\n";
    for (const auto& o : outputs) os << o.path << " = sha256:" << o.sha256 << '\n';
    os << "[summary]\n";
    for (const auto& [k, v] : summary) os << k << " = " << v << '\n';
    return os.str();
}

RunManifest run_scenario(const ScenarioConfig& config)
{
    config.validate();
    RunManifest manifest;
    manifest.config = config.echo();
    const auto start = std::chrono::steady_clock::now();
    switch (config.scenario) {
        case Scenario::rabi: run_rabi(config, manifest); break;
        case Scenario::fig3: run_fig3(config, manifest); break;
        case Scenario::reversal: run_reversal(config, manifest); break;
        case Scenario::signal: run_signal(config, manifest); break;
        case Scenario::protocol: run_protocol_scenario(config, manifest); break;
        case Scenario::estimate: run_estimate(config, manifest); break;
    }
    manifest.outputs.insert(manifest.outputs.begin(), {config.out, sha256_file(config.out)});
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string path = config.out + ".manifest";
    auto out = open_output(path);
    out << manifest.to_text();
    close_output(out, path);
    return manifest;
}

std::string sha256_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw OutputError("cannot read '" + path + "' for digest");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw OutputError("SHA-256 unavailable");
    }
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

}  // namespace phasemap::scenario
