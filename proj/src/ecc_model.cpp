#include "rrsim/ecc_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rrsim {

void EccConfig::validate() const {
  if (correction_capability_t <= 0) throw std::invalid_argument("ECC correction capability must be > 0");
  if (codeword_payload_bits <= 0) throw std::invalid_argument("codeword payload bits must be > 0");
  if (codewords_per_page < 1) throw std::invalid_argument("codewords per page must be >= 1");
  if (!(guardband_sigmas >= 0.0)) throw std::invalid_argument("guardband_sigmas must be >= 0");
}

int deterministic_error_count(double rber, const EccConfig& ecc) {
  const double n = ecc.codeword_payload_bits;
  const double sd = std::sqrt(n * rber * (1.0 - rber));
  return static_cast<int>(std::lround(rber * n + ecc.guardband_sigmas * sd));
}

std::vector<int> realize_errors(double rber, const EccConfig& ecc, Rng& rng) {
  if (!(rber >= 0.0 && rber <= 1.0)) throw std::invalid_argument("rber must be in [0, 1]");
  std::vector<int> counts(static_cast<std::size_t>(ecc.codewords_per_page), 0);
  if (ecc.deterministic_mode) {
    std::fill(counts.begin(), counts.end(), deterministic_error_count(rber, ecc));
    return counts;
  }
  if (rber == 0.0) return counts;
  std::binomial_distribution<int> dist(ecc.codeword_payload_bits, rber);
  for (auto& c : counts) c = dist(rng);
  return counts;
}

DecodeResult decode(std::vector<int> counts, const EccConfig& ecc) {
  if (counts.size() != static_cast<std::size_t>(ecc.codewords_per_page))
    throw std::invalid_argument("codeword count does not match codewords_per_page");
  DecodeResult r;
  const int worst = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
  r.margin = ecc.correction_capability_t - worst;
  r.success = r.margin >= 0;
  r.errors_per_codeword = std::move(counts);
  return r;
}

}  // namespace rrsim
