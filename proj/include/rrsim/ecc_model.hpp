#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace rrsim {

struct EccConfig {
  int correction_capability_t = 72;
  int codeword_payload_bits = 8192;
  int codewords_per_page = 16;
  bool deterministic_mode = false;
  double guardband_sigmas = 0.0;

  void validate() const;
};

struct DecodeResult {
  bool success = false;
  std::vector<int> errors_per_codeword;
  int margin = 0;  // t - worst codeword; negative on failure
};

using Rng = std::mt19937_64;

/// Per-codeword raw bit-error counts for one page read at the given RBER.
std::vector<int> realize_errors(double rber, const EccConfig& ecc, Rng& rng);

/// Deterministic-mode count for a single codeword.
int deterministic_error_count(double rber, const EccConfig& ecc);

DecodeResult decode(std::vector<int> counts, const EccConfig& ecc);

}  // namespace rrsim
