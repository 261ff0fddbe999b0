#include "rrsim/workload.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>

#include <fmt/format.h>

namespace rrsim {

TraceError::TraceError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(fmt::format("{}:{}: {}", source, line, what)), line_(line) {}

namespace {

std::uint64_t parse_uint(std::string_view field, const char* name, const std::string& source, int line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
    throw TraceError(source, line, fmt::format("field '{}' is not a non-negative integer: '{}'", name, field));
  return v;
}

}  // namespace

std::vector<Request> parse_trace(std::istream& in, const std::string& source) {
  std::string line;
  int lineno = 1;
  if (!std::getline(in, line)) throw TraceError(source, lineno, "empty trace (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw TraceError(source, lineno, fmt::format("expected header '{}'", kTraceHeader));

  std::vector<Request> out;
  double last_arrival = 0.0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view rest(line);
    std::string_view fields[4];
    for (int i = 0; i < 4; ++i) {
      const auto comma = rest.find(',');
      if (i < 3) {
        if (comma == std::string_view::npos) throw TraceError(source, lineno, "expected 4 comma-separated fields");
        fields[i] = rest.substr(0, comma);
        rest.remove_prefix(comma + 1);
      } else {
        if (comma != std::string_view::npos) throw TraceError(source, lineno, "expected 4 comma-separated fields");
        fields[i] = rest;
      }
    }
    Request r;
    r.arrival_us = static_cast<double>(parse_uint(fields[0], "arrival_us", source, lineno));
    if (fields[1] == "R") {
      r.op = OpKind::Read;
    } else if (fields[1] == "W") {
      r.op = OpKind::Write;
    } else {
      throw TraceError(source, lineno, fmt::format("unknown op '{}' (expected R or W)", fields[1]));
    }
    r.lba = parse_uint(fields[2], "lba_4k", source, lineno);
    const std::uint64_t n = parse_uint(fields[3], "n_4k", source, lineno);
    if (n < 1 || n > UINT32_MAX) throw TraceError(source, lineno, "n_4k must be in 1..2^32-1");
    r.n_blocks = static_cast<std::uint32_t>(n);
    if (r.arrival_us < last_arrival) throw TraceError(source, lineno, "arrival timestamps must be non-decreasing");
    last_arrival = r.arrival_us;
    out.push_back(r);
  }
  return out;
}

std::vector<Request> parse_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace: " + path);
  return parse_trace(in, path);
}

void write_trace(std::ostream& out, const std::vector<Request>& requests) {
  out << kTraceHeader << '\n';
  for (const auto& r : requests) {
    if (r.arrival_us < 0 || r.arrival_us != std::floor(r.arrival_us))
      throw std::invalid_argument("trace format requires integer microsecond arrivals");
    out << fmt::format("{},{},{},{}\n", static_cast<std::uint64_t>(r.arrival_us), r.op == OpKind::Read ? 'R' : 'W',
                       r.lba, r.n_blocks);
  }
}

void SynthSpec::validate() const {
  if (!(duration_us > 0)) throw std::invalid_argument("workload duration_us must be > 0");
  if (!(mean_iat_us > 0)) throw std::invalid_argument("workload mean_iat_us must be > 0");
  if (!(read_ratio >= 0.0 && read_ratio <= 1.0)) throw std::invalid_argument("workload read_ratio must be in [0, 1]");
  if (working_set_blocks < 1) throw std::invalid_argument("workload working_set_blocks must be >= 1");
  if (size_min_blocks < 1 || size_max_blocks < size_min_blocks)
    throw std::invalid_argument("workload request size range invalid");
  if (size_max_blocks > working_set_blocks) throw std::invalid_argument("request size exceeds working set");
  if (address == AddressDistribution::Zipf && !(zipf_theta > 0.0))
    throw std::invalid_argument("zipf theta must be > 0");
}

SynthSpec workload_preset(const std::string& name) {
  SynthSpec s;
  if (name == "read90") {
    s.read_ratio = 0.9;
  } else if (name == "read70") {
    s.read_ratio = 0.7;
  } else if (name == "mixed50") {
    s.read_ratio = 0.5;
    s.address = AddressDistribution::Uniform;
  } else {
    throw std::invalid_argument("unknown workload preset: " + name);
  }
  return s;
}

const std::vector<std::string>& workload_preset_names() {
  static const std::vector<std::string> names = {"read90", "read70", "mixed50"};
  return names;
}

ZipfSampler::ZipfSampler(std::uint64_t n, double theta) {
  if (n < 1) throw std::invalid_argument("zipf support must be non-empty");
  cdf_.resize(n);
  double acc = 0.0;
  for (std::uint64_t k = 0; k < n; ++k) {
    acc += std::pow(static_cast<double>(k + 1), -theta);
    cdf_[k] = acc;
  }
  for (auto& c : cdf_) c /= acc;
}

double ZipfSampler::mass_of_top(std::uint64_t k) const {
  if (k == 0) return 0.0;
  return cdf_[std::min<std::uint64_t>(k, cdf_.size()) - 1];
}

std::vector<Request> generate(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> iat(1.0 / spec.mean_iat_us);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> size(spec.size_min_blocks, spec.size_max_blocks);
  std::uniform_int_distribution<std::uint64_t> uniform_block(0, spec.working_set_blocks - 1);
  std::unique_ptr<ZipfSampler> zipf;
  if (spec.address == AddressDistribution::Zipf)
    zipf = std::make_unique<ZipfSampler>(spec.working_set_blocks, spec.zipf_theta);

  std::vector<Request> out;
  double clock = 0.0;
  while (true) {
    clock += iat(rng);
    if (clock > spec.duration_us) break;
    Request r;
    r.arrival_us = std::floor(clock);
    r.op = coin(rng) < spec.read_ratio ? OpKind::Read : OpKind::Write;
    r.n_blocks = size(rng);
    const std::uint64_t block = zipf ? (*zipf)(rng) : uniform_block(rng);
    r.lba = std::min<std::uint64_t>(block, spec.working_set_blocks - r.n_blocks);
    out.push_back(r);
  }
  return out;
}

}  // namespace rrsim
