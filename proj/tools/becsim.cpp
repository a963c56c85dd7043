// Command-line runner for the Ramsey interference simulator.
//
// Subcommands: run, sweep-delay, sweep-detuning, spectrum, fit, validate.
// Every physics option mirrors a config-file key (same names, '-' for '_');
// precedence is CLI flag > config file > built-in defaults.

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "becsim/runner.hpp"
#include "becsim/version.hpp"

using namespace becsim;

namespace {

const std::vector<std::string> kConfigKeys = {
    "delta", "gamma", "v_coeff", "omega_coeff", "e0", "k0L", "max_order", "nx", "stencil",
    "dt", "drop_spatial_derivatives", "dt_pulse", "tau", "sample_every",
    "tau_min", "tau_max", "tau_count", "delta_min", "delta_max", "delta_count",
    "independent_runs", "no_fringe",
};

struct Cli {
    std::string config_file;
    std::map<std::string, std::string> overrides;
    CmdOptions cmd;
    std::string snapshot;
    std::string fringe_csv;
    std::string channel = "s0";
    std::string modes_csv = "0,2,-2";

    void add_common(CLI::App* app) {
        app->add_option("--config", config_file, "configuration file (key = value lines)");
        app->add_option("--out", cmd.out_dir, "output directory")->capture_default_str();
        app->add_option("--workers", cmd.workers,
                        "worker threads for sweeps (0 = BECSIM_WORKERS or hardware)");
        for (const std::string& key : kConfigKeys) {
            std::string flag = "--" + key;
            for (char& c : flag)
                if (c == '_') c = '-';
            app->add_option_function<std::string>(
                   flag, [this, key](const std::string& v) { overrides[key] = v; },
                   "config key " + key)
                ->type_name("VALUE");
        }
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config_file.empty()) cfg = load_config(config_file);
        for (const auto& [key, value] : overrides) apply_override(cfg, key, value);
        return cfg;
    }
};

std::vector<int> parse_modes(const std::string& csv) {
    std::vector<int> out;
    std::string cur;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (out.empty()) throw ConfigError("modes", "empty mode list");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"becsim: two-pulse Ramsey interference in a 1D condensate"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Cli cli;
    CLI::App* run = app.add_subcommand("run", "one Ramsey run, full artifact set");
    CLI::App* sweep_d = app.add_subcommand("sweep-delay", "fringe scan over the pulse delay");
    CLI::App* sweep_det = app.add_subcommand("sweep-detuning", "dispersion scan over the detuning");
    CLI::App* spectrum = app.add_subcommand("spectrum", "momentum spectra of a stored snapshot");
    CLI::App* fit = app.add_subcommand("fit", "fit a stored fringe CSV");
    CLI::App* validate = app.add_subcommand("validate", "run the fast invariant suite");

    for (CLI::App* sub : {run, sweep_d, sweep_det, spectrum, fit, validate}) cli.add_common(sub);
    spectrum->add_option("--snapshot", cli.snapshot, "snapshot file to analyze")->required();
    spectrum->add_option("--modes", cli.modes_csv, "comma-separated ground mode indices")
        ->capture_default_str();
    fit->add_option("--input", cli.fringe_csv, "fringe CSV to fit")->required();
    fit->add_option("--channel", cli.channel, "s0, s2 or s_minus2")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = cli.resolve();
        if (run->parsed()) return cmd_run(cfg, cli.cmd, std::cout);
        if (sweep_d->parsed()) return cmd_sweep_delay(cfg, cli.cmd, std::cout);
        if (sweep_det->parsed()) return cmd_sweep_detuning(cfg, cli.cmd, std::cout);
        if (spectrum->parsed())
            return cmd_spectrum(cfg, cli.snapshot, parse_modes(cli.modes_csv), cli.cmd, std::cout);
        if (fit->parsed()) return cmd_fit(cfg, cli.fringe_csv, cli.channel, cli.cmd, std::cout);
        if (validate->parsed()) return cmd_validate(cfg, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
