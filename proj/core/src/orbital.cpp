#include "leosim/orbital.hpp"

#include <cmath>

#include <fmt/format.h>

#include "leosim/error.hpp"

namespace leosim {

double Vec3::Norm() const { return std::sqrt(x * x + y * y + z * z); }

void ShellSpec::Validate() const {
  if (!(altitude_km > 0)) {
    throw InvalidArgument(
        fmt::format("shell altitude_km must be > 0, got {}", altitude_km));
  }
  if (inclination_deg < 0 || inclination_deg > 180) {
    throw InvalidArgument(fmt::format(
        "shell inclination_deg must be in [0, 180], got {}", inclination_deg));
  }
  if (num_planes <= 0) {
    throw InvalidArgument(
        fmt::format("shell num_planes must be positive, got {}", num_planes));
  }
  if (sats_per_plane <= 0) {
    throw InvalidArgument(fmt::format(
        "shell sats_per_plane must be positive, got {}", sats_per_plane));
  }
  if (phasing_factor < 0 || phasing_factor >= num_planes) {
    throw InvalidArgument(
        fmt::format("shell phasing_factor must be in [0, {}), got {}",
                    num_planes, phasing_factor));
  }
  if (raan_spread_deg != 180 && raan_spread_deg != 360) {
    throw InvalidArgument(fmt::format(
        "shell raan_spread_deg must be 180 or 360, got {}", raan_spread_deg));
  }
}

int ConstellationSpec::satellite_count() const {
  int total = 0;
  for (const auto& shell : shells) total += shell.satellite_count();
  return total;
}

void ConstellationSpec::Validate() const {
  if (shells.empty()) {
    throw InvalidArgument(
        fmt::format("constellation '{}' has no shells", name));
  }
  for (const auto& shell : shells) shell.Validate();
}

std::vector<SatElements> BuildConstellation(const ConstellationSpec& spec) {
  spec.Validate();
  std::vector<SatElements> out;
  out.reserve(spec.satellite_count());
  for (int s = 0; s < static_cast<int>(spec.shells.size()); ++s) {
    const ShellSpec& shell = spec.shells[s];
    const int total = shell.satellite_count();
    const double plane_step = DegToRad(shell.raan_spread_deg) / shell.num_planes;
    const double slot_step = 2 * kPi / shell.sats_per_plane;
    const double phase_offset = shell.phasing_factor * 2 * kPi / total;
    for (int p = 0; p < shell.num_planes; ++p) {
      for (int k = 0; k < shell.sats_per_plane; ++k) {
        SatElements e;
        e.shell_index = s;
        e.plane_index = p;
        e.slot_index = k;
        e.raan_rad = p * plane_step;
        e.phase0_rad = k * slot_step + p * phase_offset;
        e.inclination_rad = DegToRad(shell.inclination_deg);
        e.semi_major_axis_km = kEarthRadiusKm + shell.altitude_km;
        out.push_back(e);
      }
    }
  }
  return out;
}

double MeanMotion(double semi_major_axis_km) {
  return std::sqrt(kEarthMuKm3PerS2 /
                   (semi_major_axis_km * semi_major_axis_km *
                    semi_major_axis_km));
}

double OrbitalPeriod(double altitude_km) {
  if (!(altitude_km > 0)) {
    throw InvalidArgument(
        fmt::format("altitude_km must be > 0, got {}", altitude_km));
  }
  const double a = kEarthRadiusKm + altitude_km;
  return 2 * kPi * std::sqrt(a * a * a / kEarthMuKm3PerS2);
}

double CircularSpeed(double altitude_km) {
  if (!(altitude_km > 0)) {
    throw InvalidArgument(
        fmt::format("altitude_km must be > 0, got {}", altitude_km));
  }
  return std::sqrt(kEarthMuKm3PerS2 / (kEarthRadiusKm + altitude_km));
}

namespace {

// Orbital-plane coordinates (in-plane angle u) rotated by inclination about x
// and then by RAAN about z.
Vec3 PlaneToInertial(double u, double inc, double raan, double radius) {
  const double cu = std::cos(u), su = std::sin(u);
  const double ci = std::cos(inc), si = std::sin(inc);
  const double co = std::cos(raan), so = std::sin(raan);
  return {radius * (cu * co - su * ci * so), radius * (cu * so + su * ci * co),
          radius * (su * si)};
}

Vec3 RotateZ(const Vec3& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

}  // namespace

SatPosition Propagate(const SatElements& e, double t_s, Frame frame) {
  const double u = e.phase0_rad + MeanMotion(e.semi_major_axis_km) * t_s;
  Vec3 r = PlaneToInertial(u, e.inclination_rad, e.raan_rad,
                           e.semi_major_axis_km);
  if (frame == Frame::kEarthFixed) {
    r = RotateZ(r, -kEarthRotationRadPerS * t_s);
  }
  return {r, frame};
}

Vec3 InertialVelocity(const SatElements& e, double t_s) {
  const double n = MeanMotion(e.semi_major_axis_km);
  const double u = e.phase0_rad + n * t_s;
  // d/du of the in-plane position is the position at u + 90 degrees.
  return PlaneToInertial(u + kPi / 2, e.inclination_rad, e.raan_rad,
                         e.semi_major_axis_km * n);
}

GeoPoint Subpoint(const SatPosition& pos) {
  if (pos.frame != Frame::kEarthFixed) {
    throw InvalidArgument("subpoint requires an earth-fixed position");
  }
  const Vec3& r = pos.r;
  const double horizontal = std::sqrt(r.x * r.x + r.y * r.y);
  GeoPoint g;
  g.lat_deg = RadToDeg(std::atan2(r.z, horizontal));
  g.lon_deg = horizontal == 0 ? 0.0 : RadToDeg(std::atan2(r.y, r.x));
  return g;
}

SatPosition EarthFixedPoint(double lat_deg, double lon_deg,
                            double altitude_km) {
  const double lat = DegToRad(lat_deg), lon = DegToRad(lon_deg);
  const double radius = kEarthRadiusKm + altitude_km;
  return {{radius * std::cos(lat) * std::cos(lon),
           radius * std::cos(lat) * std::sin(lon), radius * std::sin(lat)},
          Frame::kEarthFixed};
}

double ElevationDeg(const Vec3& observer, const Vec3& target) {
  const Vec3 los = target - observer;
  const double up_norm = observer.Norm();
  if (los.Norm() == 0 || up_norm == 0) return 90.0;
  const Vec3 up = observer * (1.0 / up_norm);
  const double vertical = los.Dot(up);
  // atan2 keeps precision near the zenith where asin flattens out.
  const double horizontal = (los - up * vertical).Norm();
  return RadToDeg(std::atan2(vertical, horizontal));
}

}  // namespace leosim
