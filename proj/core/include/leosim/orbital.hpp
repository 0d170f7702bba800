#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace leosim {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kEarthMuKm3PerS2 = 398600.4418;
inline constexpr double kEarthRotationRadPerS = 7.2921159e-5;
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double DegToRad(double deg) { return deg * kPi / 180.0; }
inline constexpr double RadToDeg(double rad) { return rad * 180.0 / kPi; }

struct Vec3 {
  double x = 0;
  double y = 0;
  double z = 0;

  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double Dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double Norm() const;
  bool operator==(const Vec3&) const = default;
};

// One Walker shell. raan_spread_deg is 360 for inclined "delta" shells and
// 180 for polar "star" shells.
struct ShellSpec {
  double altitude_km = 0;
  double inclination_deg = 0;
  int num_planes = 0;
  int sats_per_plane = 0;
  int phasing_factor = 0;
  double raan_spread_deg = 360;

  int satellite_count() const { return num_planes * sats_per_plane; }
  // Throws Error(kInvalidArgument) naming the violated constraint.
  void Validate() const;
};

struct ConstellationSpec {
  std::string name;
  std::vector<ShellSpec> shells;

  int satellite_count() const;
  void Validate() const;
};

struct SatElements {
  int shell_index = 0;
  int plane_index = 0;
  int slot_index = 0;
  double raan_rad = 0;
  double phase0_rad = 0;
  double inclination_rad = 0;
  double semi_major_axis_km = 0;
};

enum class Frame { kInertial, kEarthFixed };

struct SatPosition {
  Vec3 r;  // km
  Frame frame = Frame::kInertial;
};

struct GeoPoint {
  double lat_deg = 0;
  double lon_deg = 0;
};

// One element per (shell, plane, slot) in that nesting order.
std::vector<SatElements> BuildConstellation(const ConstellationSpec& spec);

SatPosition Propagate(const SatElements& elements, double t_s,
                      Frame frame = Frame::kInertial);

// Inertial velocity in km/s.
Vec3 InertialVelocity(const SatElements& elements, double t_s);

double MeanMotion(double semi_major_axis_km);
double OrbitalPeriod(double altitude_km);
double CircularSpeed(double altitude_km);

// Nadir point on a spherical Earth. Requires an earth-fixed position; the
// longitude at either pole is reported as 0.
GeoPoint Subpoint(const SatPosition& pos);

// Earth-fixed point at the given geocentric latitude/longitude and altitude.
SatPosition EarthFixedPoint(double lat_deg, double lon_deg, double altitude_km);

// Elevation of `target` seen from `observer` on the Earth's surface, in
// degrees. Both positions earth-fixed.
double ElevationDeg(const Vec3& observer, const Vec3& target);

namespace presets {

ConstellationSpec Iridium();
ConstellationSpec Globalstar();
ConstellationSpec OneWeb();
ConstellationSpec StarlinkSim();
ConstellationSpec Kuiper();
ConstellationSpec Telesat();

// Case-insensitive lookup; throws Error(kInvalidArgument) listing the
// known names on a miss.
ConstellationSpec ByName(const std::string& name);
std::vector<std::string> Names();

}  // namespace presets

}  // namespace leosim
