#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "afdm/types.hpp"

namespace afdm {

// BPSK exists only so the analysis module can reject it (two phases, E{x^2} != 0).
enum class Constellation { QPSK, QAM16, BPSK };

int bits_per_symbol(Constellation c);
// E|x|^4 for unit average energy.
double fourth_moment(Constellation c);
const char* constellation_name(Constellation c);
Constellation parse_constellation(const std::string& s);

struct FrameSpec {
  double pilot_power = 100.0;       // sigma_p^2
  double data_symbol_power = 0.0;   // sigma_d^2 per subcarrier
  Constellation constellation = Constellation::QPSK;

  double total_power(int n_sub) const { return pilot_power + n_sub * data_symbol_power; }
};

struct Frame {
  CVec x_pilot;
  CVec x_data;
  CVec x;
  double pilot_energy = 0;  // |x_p|^2
  double data_energy = 0;   // |x_d|^2
  double energy = 0;        // |x|^2
};

// Gray mapping. QPSK: b0 -> I, b1 -> Q, bit 0 maps to +1/sqrt(2).
// QAM16: b0,b2 -> I and b1,b3 -> Q, Gray levels {+3,+1,-1,-3}/sqrt(10).
CVec map_bits(const std::vector<uint8_t>& bits, int n_sub, const FrameSpec& spec);
std::vector<uint8_t> demap_symbols(const CVec& y, const FrameSpec& spec);

Frame assemble_frame(const CVec& x_p, const CVec& x_d);

std::vector<uint8_t> random_bits(std::size_t n, std::mt19937_64& rng);
// Uniform random symbols from the constellation, scaled to sigma_d.
CVec random_symbols(int n_sub, const FrameSpec& spec, std::mt19937_64& rng);

}  // namespace afdm
