#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace rrsim {

enum class OpKind { Read, Write };

struct Request {
  double arrival_us = 0.0;
  OpKind op = OpKind::Read;
  std::uint64_t lba = 0;  // 4-KiB logical block
  std::uint32_t n_blocks = 1;

  friend bool operator==(const Request&, const Request&) = default;
};

class TraceError : public std::runtime_error {
 public:
  TraceError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

inline constexpr const char* kTraceHeader = "arrival_us,op,lba_4k,n_4k";

std::vector<Request> parse_trace(std::istream& in, const std::string& source = "<stream>");
std::vector<Request> parse_trace(const std::string& path);
void write_trace(std::ostream& out, const std::vector<Request>& requests);

enum class AddressDistribution { Uniform, Zipf };

struct SynthSpec {
  double duration_us = 2'000'000.0;
  double mean_iat_us = 100.0;
  double read_ratio = 0.9;
  std::uint64_t working_set_blocks = 1u << 20;
  AddressDistribution address = AddressDistribution::Zipf;
  double zipf_theta = 0.9;
  std::uint32_t size_min_blocks = 1;
  std::uint32_t size_max_blocks = 8;

  void validate() const;
};

/// Named presets: read90, read70, mixed50.
SynthSpec workload_preset(const std::string& name);
const std::vector<std::string>& workload_preset_names();

std::vector<Request> generate(const SynthSpec& spec, std::uint64_t seed);

/// Inverse-CDF sampler over ranks 0..n-1 with P(rank k) proportional to (k+1)^-theta.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double theta);
  template <class Rng>
  std::uint64_t operator()(Rng& rng) const;
  double mass_of_top(std::uint64_t k) const;

 private:
  std::vector<double> cdf_;
};

}  // namespace rrsim

#include <algorithm>
#include <random>

namespace rrsim {

template <class Rng>
std::uint64_t ZipfSampler::operator()(Rng& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::uint64_t>(it - cdf_.begin());
}

}  // namespace rrsim
