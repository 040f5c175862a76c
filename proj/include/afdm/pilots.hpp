#pragma once

#include <string>

#include "afdm/config.hpp"
#include "afdm/types.hpp"

namespace afdm {

enum class PilotKind { proposed, traditional_spi, single, raw_zc };

const char* pilot_kind_name(PilotKind k);
PilotKind parse_pilot_kind(const std::string& s);

struct PilotScheme {
  PilotKind kind = PilotKind::proposed;
  double pilot_power = 100.0;
  int root = 1;       // ZC root u
  int r = 0;          // proposed: spacing exponent
  int tau_m = 0;      // SPI: design delay (ignored when spacing is set)
  int nu_m = 2;
  int spacing = 0;    // SPI/raw_zc: explicit Q, 0 derives it
  int count = 0;      // SPI/raw_zc: explicit Np, 0 derives it
};

// Np-length ZC. Even Np: exp(-j pi u n^2 / Np). Odd Np: exp(-j pi u n (n+1) / Np).
CVec zc_sequence(int length, int root);

struct C1Choice {
  double c1;
  int q;
};
// Smallest q with 2^(q-1) < 2 nu_m + 1 <= 2^q, and c1 = 2^q / (2 Nc).
C1Choice select_c1_q(int nu_m, const AfdmConfig& cfg);

struct ProposedLayout {
  int p, q, r;
  int spacing;  // Q = 2^(q+r)
  int count;    // Np = Nc / Q
};
ProposedLayout proposed_layout(const AfdmConfig& cfg, int nu_m, int r);

// x_p[m] = sqrt(sigma_p^2/Np) z[m/Q] exp(j2pi psi[m]) on m = 0, Q, ..., (Np-1)Q,
// psi[m] = m^2 2^r / (2 Q Nc) - c2 m^2.
CVec proposed_pilot(const AfdmConfig& cfg, int nu_m, int r, double pilot_power, int root = 1);

struct SpiLayout {
  int spacing;
  int count;
};
SpiLayout spi_layout(const AfdmConfig& cfg, int tau_m, int nu_m, int spacing = 0, int count = 0);
// Equal-power pilots with ZC phases at spacing Q, no psi correction.
CVec traditional_spi_pilot(const AfdmConfig& cfg, int tau_m, int nu_m, double pilot_power,
                           int root = 1, int spacing = 0, int count = 0);

CVec single_pilot(const AfdmConfig& cfg, double pilot_power);

// ZC placed at spacing Q without the psi phase. Q = 1 fills every subcarrier.
CVec raw_zc_pilot(const AfdmConfig& cfg, int spacing, double pilot_power, int root = 1);

// floor((Q - 2 nu_m - 1) / (2 c1 Nc)), clamped at 0.
int max_unambiguous_delay(int spacing, int nu_m, double c1, int n_sub);

CVec make_pilot(const PilotScheme& scheme, const AfdmConfig& cfg);

}  // namespace afdm
