#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "becsim/config.hpp"
#include "becsim/dynamics.hpp"
#include "becsim/fringe.hpp"
#include "becsim/spectrum.hpp"

namespace becsim {

// All writers are deterministic: the same inputs produce the same bytes.
// Every CSV starts with "# schema=..." and "# param_hash=..." comment lines
// tying it to the manifest of its run.

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ModeSet& modes,
                          const std::string& param_hash);
void write_fringes_csv(std::ostream& out, const FringeSeries& series, const std::string& param_hash);
void write_spectrum_csv(std::ostream& out, const std::vector<MomentumSpectrum>& spectra,
                        const std::string& param_hash);
void write_dispersion_csv(std::ostream& out, const std::vector<DispersionRow>& rows,
                          const std::string& param_hash);

// JSON sidecar with the moments, window and provenance of a spectrum set.
std::string spectrum_sidecar_json(const std::vector<MomentumSpectrum>& spectra,
                                  const std::vector<RecoilReport>& reports,
                                  const std::string& param_hash);
std::string recoil_json(const std::vector<std::pair<std::string, RecoilReport>>& labeled,
                        const std::string& param_hash);
std::string fit_json(const FringeFit& fit, const std::string& channel, double delta,
                     const std::string& param_hash);

// Versioned little-endian snapshot: header (magic, version, nx, max_order,
// stencil, t) followed by the ground then excited arrays as re/im doubles.
void save_snapshot(const std::filesystem::path& file, const FieldState& state);
FieldState load_snapshot(const std::filesystem::path& file);

struct Manifest {
    RunConfig config;
    std::string command;
    std::vector<std::string> outputs;
    std::vector<std::string> failures; // sweep report: failed points, empty when clean
};

// manifest.json: schema, code version, timestamp, parameter hash, the full
// resolved config, and the produced file list. The timestamp is the only
// non-reproducible field and lives nowhere else.
void write_manifest(const std::filesystem::path& file, const Manifest& manifest);

} // namespace becsim
