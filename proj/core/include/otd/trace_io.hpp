#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "otd/trace.hpp"

namespace otd {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kTraceCsvHeader =
    "t,accel_pedal_pct,dist_ahead_m,speed_ahead_kmh,rel_speed_kmh,speed_kmh,"
    "lat_acc_ms2,lon_acc_ms2,lane_change,left_ind,right_ind";

/// Loads a trace CSV (plus its .meta.json sidecar when present) and runs
/// full validation. Parse and range errors carry the 1-based row number.
CanTrace load_trace(const std::filesystem::path& path);

/// Writes the trace CSV and a .meta.json sidecar (truck, file id, label).
/// Values are printed with shortest round-trip formatting, so
/// load_trace(save_trace(x)) reproduces every numeric field bit-for-bit.
void save_trace(const CanTrace& trace, const std::filesystem::path& path);

/// Sidecar path convention: "<trace>.csv" -> "<trace>.meta.json".
std::filesystem::path sidecar_path(const std::filesystem::path& trace_path);

/// Shortest round-trip decimal rendering of a double (std::to_chars).
std::string format_double(double v);

}  // namespace otd
