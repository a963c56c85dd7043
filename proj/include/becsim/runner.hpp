#pragma once

#include <filesystem>
#include <iosfwd>

#include "becsim/config.hpp"

namespace becsim {

// Exit codes shared by the library entry points and the CLI.
enum ExitCode {
    kExitOk = 0,
    kExitConfig = 2,
    kExitDivergence = 3,
    kExitPartialSweep = 4,
    kExitValidation = 5,
};

struct CmdOptions {
    std::filesystem::path out_dir = "becsim_out";
    int workers = 0; // 0: BECSIM_WORKERS or hardware count
};

// One Ramsey run: trajectory CSV, boundary snapshots, spectra of the
// measurement-time state, recoil reports after pulse 1 and at measurement,
// and the manifest.
int cmd_run(const RunConfig& config, const CmdOptions& options, std::ostream& log);

// Delay sweep at fixed detuning: fringe CSV, per-point manifests, fringe fit
// of each channel, sweep manifest.
int cmd_sweep_delay(const RunConfig& config, const CmdOptions& options, std::ostream& log);

// Detuning sweep: dispersion CSV (plus per-delta fringe CSVs when fits are
// enabled), sweep manifest; partial failures are reported and reflected in
// the exit status.
int cmd_sweep_detuning(const RunConfig& config, const CmdOptions& options, std::ostream& log);

// Momentum spectra and recoil reports of a stored snapshot.
int cmd_spectrum(const RunConfig& config, const std::filesystem::path& snapshot,
                 const std::vector<int>& modes, const CmdOptions& options, std::ostream& log);

// Fit a stored fringe CSV.
int cmd_fit(const RunConfig& config, const std::filesystem::path& fringe_csv,
            const std::string& channel, const CmdOptions& options, std::ostream& log);

// Fast invariant suite: Rabi oracle, norm conservation, parity, Parseval,
// dissipation balance. Prints one line per property with the measured value.
int cmd_validate(const RunConfig& config, std::ostream& log);

} // namespace becsim
