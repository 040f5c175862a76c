#include "afdm/modem.hpp"

#include <cmath>
#include <string>

namespace afdm {

int bits_per_symbol(Constellation c) {
  switch (c) {
    case Constellation::QPSK: return 2;
    case Constellation::QAM16: return 4;
    case Constellation::BPSK: return 1;
  }
  return 0;
}

double fourth_moment(Constellation c) {
  switch (c) {
    case Constellation::QPSK: return 1.0;
    case Constellation::QAM16: return 1.32;
    case Constellation::BPSK: return 1.0;
  }
  return 0;
}

const char* constellation_name(Constellation c) {
  switch (c) {
    case Constellation::QPSK: return "qpsk";
    case Constellation::QAM16: return "qam16";
    case Constellation::BPSK: return "bpsk";
  }
  return "?";
}

Constellation parse_constellation(const std::string& s) {
  if (s == "qpsk" || s == "QPSK") return Constellation::QPSK;
  if (s == "qam16" || s == "QAM16" || s == "16qam") return Constellation::QAM16;
  if (s == "bpsk" || s == "BPSK") return Constellation::BPSK;
  throw ConfigError("unknown constellation '" + s + "'");
}

namespace {

const double kQ = 1.0 / std::sqrt(2.0);
const double kA = 1.0 / std::sqrt(10.0);

// Gray 2-bit PAM: (hi, lo) -> level; 01 -> +3, 00 -> +1, 10 -> -1, 11 -> -3
double pam4(uint8_t hi, uint8_t lo) { return (1 - 2 * hi) * (2 - (1 - 2 * lo)); }

cd map_one(const uint8_t* b, Constellation c) {
  switch (c) {
    case Constellation::QPSK:
      return {(1 - 2 * b[0]) * kQ, (1 - 2 * b[1]) * kQ};
    case Constellation::QAM16:
      return {pam4(b[0], b[2]) * kA, pam4(b[1], b[3]) * kA};
    case Constellation::BPSK:
      return {1.0 - 2 * b[0], 0.0};
  }
  return 0;
}

void pam4_demap(double v, uint8_t& hi, uint8_t& lo) {
  hi = v < 0;
  lo = std::abs(v) > 2.0;
}

}  // namespace

CVec map_bits(const std::vector<uint8_t>& bits, int n_sub, const FrameSpec& spec) {
  const int bps = bits_per_symbol(spec.constellation);
  if (bits.size() != static_cast<std::size_t>(n_sub) * bps)
    throw ConfigError("map_bits: expected " + std::to_string(n_sub * bps) + " bits, got " +
                      std::to_string(bits.size()));
  const double sd = std::sqrt(spec.data_symbol_power);
  CVec out(n_sub);
  for (int m = 0; m < n_sub; ++m) out[m] = map_one(&bits[m * bps], spec.constellation) * sd;
  return out;
}

std::vector<uint8_t> demap_symbols(const CVec& y, const FrameSpec& spec) {
  const int bps = bits_per_symbol(spec.constellation);
  std::vector<uint8_t> bits(y.size() * bps);
  // Decisions are scale-free for QPSK/BPSK; QAM16 needs the level grid.
  const double sd = spec.data_symbol_power > 0 ? std::sqrt(spec.data_symbol_power) : 1.0;
  for (Eigen::Index m = 0; m < y.size(); ++m) {
    uint8_t* b = &bits[m * bps];
    switch (spec.constellation) {
      case Constellation::QPSK:
        b[0] = y[m].real() < 0;
        b[1] = y[m].imag() < 0;
        break;
      case Constellation::QAM16:
        pam4_demap(y[m].real() / (sd * kA), b[0], b[2]);
        pam4_demap(y[m].imag() / (sd * kA), b[1], b[3]);
        break;
      case Constellation::BPSK:
        b[0] = y[m].real() < 0;
        break;
    }
  }
  return bits;
}

Frame assemble_frame(const CVec& x_p, const CVec& x_d) {
  if (x_p.size() != x_d.size())
    throw ConfigError("assemble_frame: pilot and data lengths differ");
  Frame f;
  f.x_pilot = x_p;
  f.x_data = x_d;
  f.x = x_p + x_d;
  f.pilot_energy = x_p.squaredNorm();
  f.data_energy = x_d.squaredNorm();
  f.energy = f.x.squaredNorm();
  return f;
}

std::vector<uint8_t> random_bits(std::size_t n, std::mt19937_64& rng) {
  std::vector<uint8_t> b(n);
  uint64_t word = 0;
  int left = 0;
  for (auto& v : b) {
    if (left == 0) {
      word = rng();
      left = 64;
    }
    v = word & 1u;
    word >>= 1;
    --left;
  }
  return b;
}

CVec random_symbols(int n_sub, const FrameSpec& spec, std::mt19937_64& rng) {
  auto bits = random_bits(static_cast<std::size_t>(n_sub) * bits_per_symbol(spec.constellation), rng);
  return map_bits(bits, n_sub, spec);
}

}  // namespace afdm
