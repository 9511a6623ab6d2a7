#pragma once

namespace acg::constants {

// CODATA 2018, SI units throughout.
inline constexpr double mu0 = 1.25663706212e-6;       // T m / A
inline constexpr double mu_B = 9.2740100783e-24;      // J / T
inline constexpr double k_B = 1.380649e-23;           // J / K
inline constexpr double h_planck = 6.62607015e-34;    // J s
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double m_rb87 = 1.4431606e-25;       // kg

// Effective magnetic moment of 87Rb in |F=2, mF=2>: g_F * mF * mu_B = mu_B.
inline constexpr double mu_eff = mu_B;

inline constexpr double pi = 3.14159265358979323846;

}  // namespace acg::constants
