#pragma once

#include <stdexcept>
#include <string>

namespace becsim {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid parameter or configuration; carries the offending field name.
struct ConfigError : Error {
    ConfigError(std::string field_, const std::string& what_)
        : Error("config error [" + field_ + "]: " + what_), field(std::move(field_)) {}
    std::string field;
};

// Mismatched grids, missing partners, malformed state.
struct StructuralError : Error {
    using Error::Error;
};

// Non-finite values detected during time stepping.
struct DivergenceError : Error {
    DivergenceError(double t_, double dt_, const std::string& context)
        : Error("divergence at t=" + std::to_string(t_) + " (dt=" + std::to_string(dt_) + ") " + context),
          t(t_), dt(dt_) {}
    double t;
    double dt;
};

// Momentum distribution undefined (zero-norm amplitude).
struct SpectrumError : Error {
    using Error::Error;
};

// Fringe fit failed; keeps the DFT initialization for diagnosis.
struct FitError : Error {
    FitError(const std::string& what_, double initial_omega_)
        : Error(what_), initial_omega(initial_omega_) {}
    double initial_omega;
};

} // namespace becsim
