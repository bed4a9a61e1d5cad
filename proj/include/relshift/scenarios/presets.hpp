#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "relshift/scenarios/config.hpp"

namespace relshift::scenarios {

/// Circular orbit whose period equals one Earth rotation of the constant set.
inline double synchronous_radius(const PhysConsts& k = {}) {
  return std::cbrt(k.GM / (k.omega_E * k.omega_E));
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "geostationary-ground", "fig3-geosync-e0.4",     "fig3-geosync-e0.7",     "fig4-meo-e0.0",
      "fig4-meo-e0.2",        "fig5-leo-geo",          "fig6-leo-geosync-e0.4", "fig6-meo-geosync-e0.4",
  };
  return names;
}

inline std::string preset_description(const std::string& name) {
  if (name == "geostationary-ground") return "equatorial ground station and geostationary satellite, one day";
  if (name == "fig3-geosync-e0.4") return "ground station and geosynchronous orbit, eccentricity 0.4, one day";
  if (name == "fig3-geosync-e0.7") return "ground station and geosynchronous orbit, eccentricity 0.7, one day";
  if (name == "fig4-meo-e0.0") return "ground station and circular MEO (a = 10378 km), one period";
  if (name == "fig4-meo-e0.2") return "ground station and MEO (a = 10378 km, eccentricity 0.2), one period";
  if (name == "fig5-leo-geo") return "LEO at 400 km and geostationary satellite, one day";
  if (name == "fig6-leo-geosync-e0.4") return "LEO at 400 km and geosynchronous orbit (a = 42248 km, e = 0.4), one day";
  if (name == "fig6-meo-geosync-e0.4")
    return "MEO at 10000 km and geosynchronous orbit (a = 42248 km, e = 0.4), one day";
  throw ConfigError("preset", 0, "unknown preset '" + name + "'");
}

/// Figure setups. Endpoint A emits by default; all bodies start at periapsis
/// on the common azimuth at t = 0.
inline ScenarioConfig preset(const std::string& name) {
  preset_description(name);
  const PhysConsts k;
  const double day = 86400.0;
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.time = {0.0, day, 60.0};
  const GroundStation ground{k.R_E, 0.0};
  const double a_sync = synchronous_radius(k);
  const double a_geo_fig6 = 42248e3;
  const double a_leo = k.R_E + 400e3;
  const double a_meo = k.R_E + 10000e3;

  if (name == "geostationary-ground") {
    cfg.endpoint_a = ground;
    cfg.endpoint_b = KeplerOrbit{a_sync, 0.0};
  } else if (name == "fig3-geosync-e0.4" || name == "fig3-geosync-e0.7") {
    cfg.endpoint_a = ground;
    cfg.endpoint_b = KeplerOrbit{a_sync, name.ends_with("0.4") ? 0.4 : 0.7};
  } else if (name == "fig4-meo-e0.0" || name == "fig4-meo-e0.2") {
    cfg.endpoint_a = ground;
    cfg.endpoint_b = KeplerOrbit{10378e3, name.ends_with("0.2") ? 0.2 : 0.0};
    cfg.time = {0.0, 10511.0, 10.0};
  } else if (name == "fig5-leo-geo") {
    cfg.endpoint_a = KeplerOrbit{a_leo, 0.0};
    cfg.endpoint_b = KeplerOrbit{a_sync, 0.0};
  } else if (name == "fig6-leo-geosync-e0.4") {
    cfg.endpoint_a = KeplerOrbit{a_leo, 0.0};
    cfg.endpoint_b = KeplerOrbit{a_geo_fig6, 0.4};
  } else {
    cfg.endpoint_a = KeplerOrbit{a_meo, 0.0};
    cfg.endpoint_b = KeplerOrbit{a_geo_fig6, 0.4};
  }
  return cfg;
}

}  // namespace relshift::scenarios
