// phasemap: scenario runner for two-level Bloch-Siegert dynamics and the
// entanglement-based remote phase-mapping protocol.
//
//   phasemap <rabi|fig3|reversal|signal|protocol|estimate>
//            [--config PATH] [--seed N] [--out PATH] [--<key> VALUE ...]
//
// Exit status: 0 ok, 2 invalid configuration, 3 numerical or I/O failure.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "phasemap/errors.hpp"
#include "phasemap/scenario.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kRunError = 3;

// Keys that may be given as --key VALUE; all of them are also valid in a config file.
const std::vector<std::pair<std::string, std::string>> kKeys = {
    {"sigma", "g0 / (4 omega)"},
    {"rabi", "g0 in angular units (alternative to sigma)"},
    {"carrier", "omega"},
    {"phi", "Alice's field phase [rad]"},
    {"chi", "Bob's field phase [rad]"},
    {"rwa", "drop the counter-rotating term (true/false)"},
    {"steps_per_period", "RK4 steps per carrier period (>= 50)"},
    {"rabi_periods", "rabi: duration in Rabi periods"},
    {"samples", "rabi: output samples"},
    {"ramp_periods", "fig3: carrier periods of the sin^2 rise"},
    {"hold_rabi_periods", "fig3: Rabi periods held at peak g0"},
    {"stride", "fig3: integrator steps per output row"},
    {"trajectory", "fig3: also write all six amplitudes here"},
    {"m_list", "reversal: comma-separated m values"},
    {"points", "signal: phase grid size"},
    {"probe_ramp", "signal: leading-edge ramp length (negative = adiabatic minimum)"},
    {"m", "protocol: g0 = omega / 2m in dynamical mode"},
    {"pairs", "protocol: entangled pairs X"},
    {"mode", "protocol: exact | sampled | dynamical"},
    {"alice_shift", "protocol: extra phase on Alice's field [rad]"},
    {"cos_shift", "estimate: shift used for the cosine quadrature [rad]"},
    {"epoch_index", "protocol: measurement at t = k pi / omega"},
    {"reps", "estimate: seeded repetitions"},
    {"workers", "protocol: sampler threads (0 = hardware)"},
};

}  // namespace

int main(int argc, char** argv)
{
    using namespace phasemap;

    CLI::App app{"Two-level Bloch-Siegert dynamics and remote phase-mapping scenarios"};
    app.require_subcommand(1);

    std::string config_path;
    std::string seed;
    std::string out;
    std::map<std::string, std::string> flags;

    std::vector<CLI::App*> subs;
    for (const char* name : {"rabi", "fig3", "reversal", "signal", "protocol", "estimate"}) {
        CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " scenario");
        sub->add_option("--config", config_path, "key = value config file");
        sub->add_option("--seed", seed, "64-bit RNG seed");
        sub->add_option("--out", out, "output CSV path");
        for (const auto& [key, help] : kKeys) sub->add_option("--" + key, flags[key], help);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        KeyValueConfig kv;
        if (!config_path.empty()) kv = KeyValueConfig::load(config_path);
        KeyValueConfig overrides;
        for (const auto& [key, value] : flags) {
            if (!value.empty()) overrides.set(key, value);
        }
        if (!seed.empty()) overrides.set("seed", seed);
        if (!out.empty()) overrides.set("out", out);
        // An explicit --rabi replaces a sigma from the file and vice versa.
        if (overrides.contains("rabi") || overrides.contains("sigma")) {
            KeyValueConfig pruned;
            for (const auto& [k, v] : kv.values()) {
                if (k != "rabi" && k != "sigma") pruned.set(k, v);
            }
            kv = pruned;
        }
        kv.merge(overrides);
        for (CLI::App* sub : subs) {
            if (sub->parsed()) kv.set("scenario", sub->get_name());
        }

        const auto config = scenario::ScenarioConfig::from(kv);
        const auto manifest = scenario::run_scenario(config);
        std::cout << manifest.to_text();
        return 0;
    } catch (const ConfigurationError& e) {
        std::cerr << "phasemap: invalid configuration: " << e.what() << '\n';
        return kUsageError;
    } catch (const ContractViolation& e) {
        std::cerr << "phasemap: invalid configuration: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "phasemap: run failed: " << e.what() << '\n';
        return kRunError;
    }
}
