#pragma once

namespace becsim {

inline constexpr const char* kVersion = "1.0.0";

// schema tags written into every artifact
inline constexpr const char* kSchemaConfig = "becsim.config/1";
inline constexpr const char* kSchemaManifest = "becsim.manifest/1";
inline constexpr const char* kSchemaTrajectory = "becsim.trajectory/1";
inline constexpr const char* kSchemaFringes = "becsim.fringes/1";
inline constexpr const char* kSchemaSpectrum = "becsim.spectrum/1";
inline constexpr const char* kSchemaDispersion = "becsim.dispersion/1";
inline constexpr const char* kSchemaSnapshot = "becsim.snapshot/1";
inline constexpr const char* kSchemaRecoil = "becsim.recoil/1";
inline constexpr const char* kSchemaFit = "becsim.fit/1";

} // namespace becsim
