#include "becsim/io.hpp"

#include <chrono>
#include <cstring>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "becsim/version.hpp"

namespace becsim {

namespace {

void csv_header(std::ostream& out, const char* schema, const std::string& param_hash) {
    out << "# schema=" << schema << "\n";
    out << "# param_hash=" << param_hash << "\n";
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

nlohmann::json config_json(const RunConfig& c) {
    // the canonical text is the hashed form; the json mirror is for readers
    nlohmann::json j;
    j["delta"] = c.params.delta;
    j["gamma"] = c.params.gamma;
    j["v_coeff"] = c.params.v_coeff;
    j["omega_coeff"] = c.params.omega_coeff;
    j["e0"] = c.params.e0;
    j["k0L"] = c.params.k0L;
    j["max_order"] = c.params.modes.max_order;
    j["nx"] = c.params.grid.nx;
    j["stencil"] = c.params.grid.stencil == Stencil::central2 ? "central2" : "upwind1";
    j["dt"] = c.params.dt;
    j["drop_spatial_derivatives"] = c.params.drop_spatial_derivatives;
    j["dt_pulse"] = c.schedule.dt_pulse;
    j["tau"] = c.schedule.tau;
    j["sample_every"] = c.sample_every;
    j["tau_min"] = c.tau_min;
    j["tau_max"] = c.tau_max;
    j["tau_count"] = c.tau_count;
    j["delta_min"] = c.delta_min;
    j["delta_max"] = c.delta_max;
    j["delta_count"] = c.delta_count;
    j["independent_runs"] = c.independent_runs;
    j["no_fringe"] = c.no_fringe;
    return j;
}

} // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ModeSet& modes,
                          const std::string& param_hash) {
    csv_header(out, kSchemaTrajectory, param_hash);
    out << "t,S0";
    for (int j = 2; j <= modes.max_order; j += 2) out << ",S" << j << ",S" << -j;
    for (int m = 1; m <= modes.max_order + 1; m += 2) out << ",P" << m << ",P" << -m;
    out << ",N\n";
    for (const PopulationRecord& rec : traj.populations) {
        out << fmt_double(rec.t) << "," << fmt_double(rec.s(modes, 0));
        for (int j = 2; j <= modes.max_order; j += 2)
            out << "," << fmt_double(rec.s(modes, j)) << "," << fmt_double(rec.s(modes, -j));
        for (int m = 1; m <= modes.max_order + 1; m += 2)
            out << "," << fmt_double(rec.p(modes, m)) << "," << fmt_double(rec.p(modes, -m));
        out << "," << fmt_double(rec.total_norm) << "\n";
    }
}

void write_fringes_csv(std::ostream& out, const FringeSeries& series, const std::string& param_hash) {
    csv_header(out, kSchemaFringes, param_hash);
    out << "# delta=" << fmt_double(series.delta) << "\n";
    out << "tau,s0,s2,s_minus2\n";
    for (size_t i = 0; i < series.tau_values.size(); ++i) {
        out << fmt_double(series.tau_values[i]) << "," << fmt_double(series.s0[i]) << ","
            << fmt_double(series.s2[i]) << "," << fmt_double(series.s_minus2[i]) << "\n";
    }
}

void write_spectrum_csv(std::ostream& out, const std::vector<MomentumSpectrum>& spectra,
                        const std::string& param_hash) {
    csv_header(out, kSchemaSpectrum, param_hash);
    if (spectra.empty()) throw StructuralError("no spectra to write");
    out << "k";
    for (const auto& s : spectra) out << ",w_" << s.mode_j;
    out << "\n";
    const size_t n = spectra.front().k.size();
    for (const auto& s : spectra)
        if (s.k.size() != n) throw StructuralError("spectra share one k grid per file");
    for (size_t i = 0; i < n; ++i) {
        out << fmt_double(spectra.front().k[i]);
        for (const auto& s : spectra) out << "," << fmt_double(s.w[i]);
        out << "\n";
    }
}

void write_dispersion_csv(std::ostream& out, const std::vector<DispersionRow>& rows,
                          const std::string& param_hash) {
    csv_header(out, kSchemaDispersion, param_hash);
    out << "delta,omega_ratio,fit_rms,kappa2_over_k0,std2_over_k0,"
           "delta_omega_ratio_mean,delta_omega_ratio_fringe\n";
    for (const auto& r : rows) {
        out << fmt_double(r.delta) << "," << fmt_double(r.omega_ratio) << ","
            << fmt_double(r.fit_rms) << "," << fmt_double(r.kappa2_over_k0) << ","
            << fmt_double(r.std2_over_k0) << "," << fmt_double(r.delta_omega_ratio_mean) << ","
            << fmt_double(r.delta_omega_ratio_fringe) << "\n";
    }
}

std::string spectrum_sidecar_json(const std::vector<MomentumSpectrum>& spectra,
                                  const std::vector<RecoilReport>& reports,
                                  const std::string& param_hash) {
    nlohmann::json j;
    j["schema"] = kSchemaSpectrum;
    j["param_hash"] = param_hash;
    j["code_version"] = kVersion;
    for (const auto& s : spectra) {
        nlohmann::json js;
        js["mode"] = s.mode_j;
        js["kappa"] = s.kappa;
        js["variance"] = s.variance;
        js["k_window"] = s.k_window;
        js["n_k"] = s.k.size();
        j["spectra"].push_back(js);
    }
    for (const auto& r : reports) {
        nlohmann::json jr;
        jr["mode"] = r.mode_j;
        jr["delta_k_over_k0"] = r.delta_k_over_k0;
        jr["std_over_k0"] = r.std_over_k0;
        jr["delta_omega_ratio"] = r.delta_omega_ratio;
        jr["refraction_index_minus_1"] = r.refraction_index_minus_1;
        j["recoil"].push_back(jr);
    }
    return j.dump(2) + "\n";
}

std::string recoil_json(const std::vector<std::pair<std::string, RecoilReport>>& labeled,
                        const std::string& param_hash) {
    nlohmann::json j;
    j["schema"] = kSchemaRecoil;
    j["param_hash"] = param_hash;
    j["code_version"] = kVersion;
    for (const auto& [label, r] : labeled) {
        nlohmann::json jr;
        jr["mode"] = r.mode_j;
        jr["delta_k_over_k0"] = r.delta_k_over_k0;
        jr["std_over_k0"] = r.std_over_k0;
        jr["delta_omega_ratio"] = r.delta_omega_ratio;
        jr["refraction_index_minus_1"] = r.refraction_index_minus_1;
        j["reports"][label] = jr;
    }
    return j.dump(2) + "\n";
}

std::string fit_json(const FringeFit& fit, const std::string& channel, double delta,
                     const std::string& param_hash) {
    nlohmann::json j;
    j["schema"] = kSchemaFit;
    j["param_hash"] = param_hash;
    j["code_version"] = kVersion;
    j["channel"] = channel;
    j["delta"] = delta;
    j["omega_rec"] = fit.omega_rec;
    j["amplitude"] = fit.amplitude;
    j["phase"] = fit.phase;
    j["offset"] = fit.offset;
    j["residual_rms"] = fit.residual_rms;
    j["omega_ratio"] = fit.omega_ratio;
    return j.dump(2) + "\n";
}

namespace {
constexpr char kSnapMagic[8] = {'B', 'E', 'C', 'S', 'N', 'A', 'P', '1'};

void put_u32(std::ostream& out, uint32_t v) { out.write((const char*)&v, 4); }
void put_i32(std::ostream& out, int32_t v) { out.write((const char*)&v, 4); }
void put_f64(std::ostream& out, double v) { out.write((const char*)&v, 8); }
uint32_t get_u32(std::istream& in) { uint32_t v; in.read((char*)&v, 4); return v; }
int32_t get_i32(std::istream& in) { int32_t v; in.read((char*)&v, 4); return v; }
double get_f64(std::istream& in) { double v; in.read((char*)&v, 8); return v; }
} // namespace

void save_snapshot(const std::filesystem::path& file, const FieldState& state) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw StructuralError("cannot open snapshot file for writing: " + file.string());
    out.write(kSnapMagic, 8);
    put_u32(out, 1);
    put_i32(out, state.grid.nx);
    put_i32(out, state.modes.max_order);
    put_u32(out, state.grid.stencil == Stencil::central2 ? 0 : 1);
    put_f64(out, state.t);
    auto put_arrays = [&](const std::vector<Cvec>& arrays) {
        for (const Cvec& v : arrays)
            for (const cplx& z : v) {
                put_f64(out, z.real());
                put_f64(out, z.imag());
            }
    };
    put_arrays(state.a);
    put_arrays(state.b);
    if (!out) throw StructuralError("snapshot write failed: " + file.string());
}

FieldState load_snapshot(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw StructuralError("cannot open snapshot file: " + file.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kSnapMagic, 8) != 0)
        throw StructuralError("not a snapshot file: " + file.string());
    const uint32_t version = get_u32(in);
    if (version != 1) throw StructuralError("unsupported snapshot version");
    GridSpec grid;
    grid.nx = get_i32(in);
    ModeSet modes;
    modes.max_order = get_i32(in);
    grid.stencil = get_u32(in) == 0 ? Stencil::central2 : Stencil::upwind1;
    const double t = get_f64(in);
    grid.validate();
    modes.validate();
    FieldState state = FieldState::zero(modes, grid);
    state.t = t;
    auto get_arrays = [&](std::vector<Cvec>& arrays) {
        for (Cvec& v : arrays)
            for (cplx& z : v) {
                const double re = get_f64(in);
                const double im = get_f64(in);
                z = cplx(re, im);
            }
    };
    get_arrays(state.a);
    get_arrays(state.b);
    if (!in) throw StructuralError("snapshot truncated: " + file.string());
    return state;
}

void write_manifest(const std::filesystem::path& file, const Manifest& manifest) {
    nlohmann::json j;
    j["schema"] = kSchemaManifest;
    j["code_version"] = kVersion;
    j["timestamp"] = iso_timestamp();
    j["command"] = manifest.command;
    j["parameter_hash"] = parameter_hash(manifest.config);
    j["config"] = config_json(manifest.config);
    j["outputs"] = manifest.outputs;
    if (!manifest.failures.empty()) j["failures"] = manifest.failures;
    std::ofstream out(file);
    if (!out) throw StructuralError("cannot write manifest: " + file.string());
    out << j.dump(2) << "\n";
}

} // namespace becsim
