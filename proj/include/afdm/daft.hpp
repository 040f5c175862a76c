#pragma once

#include "afdm/config.hpp"
#include "afdm/types.hpp"

namespace afdm {

// Fractional part of c1*n^2 (exact on the 2c1Nc lattice) and of c2*m^2.
double c1_phase(const AfdmConfig& cfg, long long n);
double c2_phase(const AfdmConfig& cfg, long long m);

// s = A^H x, evaluated as chirp -> inverse FFT -> chirp.
CVec idaft(const CVec& x, const AfdmConfig& cfg);
// x = A s.
CVec daft(const CVec& s, const AfdmConfig& cfg);

// Dense A with A[m,n] = exp(-j2pi(c1 n^2 + mn/Nc + c2 m^2)) / sqrt(Nc). Nc <= 4096.
CMat build_daft_matrix(const AfdmConfig& cfg);

// Prepends the chirp-periodic prefix, s[n] = s[Nc+n] exp(-j2pi c1 (Nc^2 + 2 Nc n)).
CVec add_cpp(const CVec& s, const AfdmConfig& cfg);
CVec remove_cpp(const CVec& r, const AfdmConfig& cfg);

// Direct O(N) evaluation of the synthesis sum at integer n (any sign).
cd synth_direct(const CVec& x, const AfdmConfig& cfg, long long n);

// Transmit waveform at a real sample instant t, using the frequency-wrapped
// instantaneous phase g_m(t) = c1 t^2 + t m/Nc - floor(2 c1 t + m/Nc) t.
// Agrees with synth_direct at integer t.
cd synth_wrapped(const CVec& x, const AfdmConfig& cfg, double t);

// v[n] = s(n - shift), n = 0..Nc-1. Integer shifts go through the exact
// prefix relation, fractional shifts through synth_wrapped.
CVec delayed_waveform(const CVec& x, const AfdmConfig& cfg, double shift);

}  // namespace afdm
