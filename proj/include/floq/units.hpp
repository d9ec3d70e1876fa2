#ifndef FLOQ_UNITS_HPP
#define FLOQ_UNITS_HPP

namespace floq {

// All internal rates and frequencies are angular (rad/s). Configuration
// files and CSV columns use ordinary frequencies in Hz; conversion happens
// exactly once at the I/O boundary.

inline constexpr double pi = 3.1415926535897932384626433832795;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hz_to_rad(double f_hz) { return two_pi * f_hz; }
inline constexpr double rad_to_hz(double w) { return w / two_pi; }

// Squared-frequency quantities (thermal coupling products) are entered in
// Hz^2 and carried internally in rad^2/s^2.
inline constexpr double hz2_to_rad2(double f_hz2) { return two_pi * two_pi * f_hz2; }
inline constexpr double rad2_to_hz2(double w2) { return w2 / (two_pi * two_pi); }

inline constexpr double hbar_js = 1.054571817e-34;     // J s
inline constexpr double speed_of_light_ms = 2.99792458e8;  // m/s

}  // namespace floq

#endif
