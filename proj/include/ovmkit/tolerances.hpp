#pragma once

namespace ovmkit::tol {

// Numerical defaults for desk-scale dimensions (n <= 32, double precision).
// Every operation that uses one of these accepts an override argument.
inline constexpr double herm = 1e-9;     // max-entry deviation from self-adjointness
inline constexpr double psd = 1e-9;      // eigenvalue slack below zero
inline constexpr double trace = 1e-9;    // unit-trace / unit-total slack
inline constexpr double rank = 1e-10;    // eigenvalue cutoff for rank decisions
inline constexpr double weight = 1e-12;  // positivity slack for scalar measures
inline constexpr double support = 1e-12; // threshold for "this piece carries mass"

}  // namespace ovmkit::tol
