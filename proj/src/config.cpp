#include "rrsim/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace rrsim {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::invalid_argument(fmt::format("config section '{}' must be an object", section));
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) throw std::invalid_argument(fmt::format("unknown config key '{}.{}'", section, key));
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("config key '{}.{}': {}", section, key, e.what()));
  }
}

json condition_list(const std::vector<OperatingCondition>& cs) {
  json a = json::array();
  for (const auto& c : cs) a.push_back(to_string(c));
  return a;
}

std::vector<OperatingCondition> read_conditions(const json& j, const std::string& where) {
  if (!j.is_array()) throw std::invalid_argument(where + " must be an array of \"<days>:<pec>\" strings");
  std::vector<OperatingCondition> out;
  for (const auto& s : j) out.push_back(parse_condition(s.get<std::string>()));
  return out;
}

const char* page_key(int p) { return p == 0 ? "lsb" : p == 1 ? "csb" : "msb"; }

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json model_to_json(const ModelParams& m) {
  json states = json::array();
  for (const auto& s : m.base_states) states.push_back({{"mean_mv", s.mean_mv}, {"stdev_mv", s.stdev_mv}});
  json pages = json::object();
  for (int p = 0; p < 3; ++p) pages[page_key(p)] = m.page_levels.boundaries[p];
  return {{"base_states", states},
          {"retention_coeff", m.retention_coeff},
          {"retention_ref_age", m.retention_ref_age},
          {"pec_widen_coeff", m.pec_widen_coeff},
          {"sensing_inflation_exp", m.sensing_inflation_exp},
          {"page_boundaries", pages}};
}

ModelParams model_from_json(const json& j, const ModelParams& defaults) {
  check_keys(j, "model", {"base_states", "retention_coeff", "retention_ref_age", "pec_widen_coeff",
                          "sensing_inflation_exp", "page_boundaries", "calibration"});
  ModelParams m = defaults;
  if (j.contains("base_states")) {
    const auto& a = j.at("base_states");
    if (!a.is_array() || a.size() != kNumStates)
      throw std::invalid_argument("model.base_states must list exactly 8 states");
    for (int i = 0; i < kNumStates; ++i) {
      check_keys(a[i], "model.base_states[]", {"mean_mv", "stdev_mv"});
      read(a[i], "mean_mv", m.base_states[i].mean_mv, "model.base_states[]");
      read(a[i], "stdev_mv", m.base_states[i].stdev_mv, "model.base_states[]");
    }
  }
  read(j, "retention_coeff", m.retention_coeff, "model");
  read(j, "retention_ref_age", m.retention_ref_age, "model");
  read(j, "pec_widen_coeff", m.pec_widen_coeff, "model");
  read(j, "sensing_inflation_exp", m.sensing_inflation_exp, "model");
  if (j.contains("page_boundaries")) {
    const auto& pb = j.at("page_boundaries");
    check_keys(pb, "model.page_boundaries", {"lsb", "csb", "msb"});
    for (int p = 0; p < 3; ++p) read(pb, page_key(p), m.page_levels.boundaries[p], "model.page_boundaries");
  }
  m.validate();
  return m;
}

void ExperimentConfig::validate() const {
  model.validate();
  ecc.validate();
  timing.validate();
  geometry.validate();
  retry.table().validate();
  if (retry.history_group_blocks < 1) throw std::invalid_argument("retry.history_group_blocks must be >= 1");
  if (retry.characterize_guardband_sigmas < kMinCharacterizationGuardband)
    throw std::invalid_argument("retry.characterize_guardband_sigmas must be >= 6");
  if (workload.trace.empty()) workload.synth.validate();
  policy_from_name(sim.policy);
  for (const auto& p : sim.sweep.policies) policy_from_name(p);
  sim.condition.validate();
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, "<root>", {"model", "ecc", "timing", "geometry", "retry", "workload", "sim"});
  ExperimentConfig c;

  if (j.contains("model")) {
    const json& m = j.at("model");
    c.model = model_from_json(m);
    if (m.contains("calibration")) {
      const json& t = m.at("calibration");
      check_keys(t, "model.calibration", {"steps_condition", "mean_retry_steps", "steps_tolerance", "tr_condition",
                                          "tr_reduction", "max_evaluations"});
      if (t.contains("steps_condition")) c.calibration.steps_condition = parse_condition(t.at("steps_condition"));
      if (t.contains("tr_condition")) c.calibration.tr_condition = parse_condition(t.at("tr_condition"));
      read(t, "mean_retry_steps", c.calibration.mean_retry_steps, "model.calibration");
      read(t, "steps_tolerance", c.calibration.steps_tolerance, "model.calibration");
      read(t, "tr_reduction", c.calibration.tr_reduction, "model.calibration");
      read(t, "max_evaluations", c.calibration.max_evaluations, "model.calibration");
    }
  }

  if (j.contains("ecc")) {
    const json& e = j.at("ecc");
    check_keys(e, "ecc", {"correction_capability_t", "codeword_payload_bits", "codewords_per_page",
                          "deterministic_mode", "guardband_sigmas"});
    read(e, "correction_capability_t", c.ecc.correction_capability_t, "ecc");
    read(e, "codeword_payload_bits", c.ecc.codeword_payload_bits, "ecc");
    read(e, "codewords_per_page", c.ecc.codewords_per_page, "ecc");
    read(e, "deterministic_mode", c.ecc.deterministic_mode, "ecc");
    read(e, "guardband_sigmas", c.ecc.guardband_sigmas, "ecc");
  }

  if (j.contains("timing")) {
    const json& t = j.at("timing");
    check_keys(t, "timing", {"t_r", "t_x", "t_e", "t_prog", "t_rst", "cache_move", "speculative_abort"});
    read(t, "t_r", c.timing.t_r, "timing");
    read(t, "t_x", c.timing.t_x, "timing");
    read(t, "t_e", c.timing.t_e, "timing");
    read(t, "t_prog", c.timing.t_prog, "timing");
    read(t, "t_rst", c.timing.t_rst, "timing");
    read(t, "cache_move", c.timing.cache_move, "timing");
    if (t.contains("speculative_abort")) {
      const auto mode = t.at("speculative_abort").get<std::string>();
      if (mode == "reset") c.timing.speculative_abort = SpeculativeAbort::Reset;
      else if (mode == "free") c.timing.speculative_abort = SpeculativeAbort::Free;
      else throw std::invalid_argument("timing.speculative_abort must be 'reset' or 'free'");
    }
  }

  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    check_keys(g, "geometry", {"channels", "chips_per_channel", "dies_per_chip", "page_size_kib", "pages_per_block",
                               "blocks_per_die"});
    read(g, "channels", c.geometry.channels, "geometry");
    read(g, "chips_per_channel", c.geometry.chips_per_channel, "geometry");
    read(g, "dies_per_chip", c.geometry.dies_per_chip, "geometry");
    read(g, "page_size_kib", c.geometry.page_size_kib, "geometry");
    read(g, "pages_per_block", c.geometry.pages_per_block, "geometry");
    read(g, "blocks_per_die", c.geometry.blocks_per_die, "geometry");
  }

  if (j.contains("retry")) {
    const json& r = j.at("retry");
    check_keys(r, "retry", {"step_mv", "max_steps", "shape", "direction", "history_group_blocks",
                            "characterize_guardband_sigmas", "conditions", "tr_grid"});
    read(r, "step_mv", c.retry.step_mv, "retry");
    read(r, "max_steps", c.retry.max_steps, "retry");
    if (r.contains("shape")) c.retry.shape = table_shape_from_string(r.at("shape").get<std::string>());
    read(r, "direction", c.retry.direction, "retry");
    read(r, "history_group_blocks", c.retry.history_group_blocks, "retry");
    read(r, "characterize_guardband_sigmas", c.retry.characterize_guardband_sigmas, "retry");
    if (r.contains("conditions")) c.retry.conditions = read_conditions(r.at("conditions"), "retry.conditions");
    read(r, "tr_grid", c.retry.tr_grid, "retry");
  }

  if (j.contains("workload")) {
    const json& w = j.at("workload");
    check_keys(w, "workload", {"preset", "trace", "duration_us", "mean_iat_us", "read_ratio", "working_set_blocks",
                               "address_distribution", "zipf_theta", "size_min_blocks", "size_max_blocks"});
    read(w, "preset", c.workload.preset, "workload");
    read(w, "trace", c.workload.trace, "workload");
    c.workload.synth = c.workload.preset.empty() ? SynthSpec{} : workload_preset(c.workload.preset);
    SynthSpec& s = c.workload.synth;
    read(w, "duration_us", s.duration_us, "workload");
    read(w, "mean_iat_us", s.mean_iat_us, "workload");
    read(w, "read_ratio", s.read_ratio, "workload");
    read(w, "working_set_blocks", s.working_set_blocks, "workload");
    if (w.contains("address_distribution")) {
      const auto d = w.at("address_distribution").get<std::string>();
      if (d == "uniform") s.address = AddressDistribution::Uniform;
      else if (d == "zipf") s.address = AddressDistribution::Zipf;
      else throw std::invalid_argument("workload.address_distribution must be 'uniform' or 'zipf'");
    }
    read(w, "zipf_theta", s.zipf_theta, "workload");
    read(w, "size_min_blocks", s.size_min_blocks, "workload");
    read(w, "size_max_blocks", s.size_max_blocks, "workload");
  }

  if (j.contains("sim")) {
    const json& s = j.at("sim");
    check_keys(s, "sim", {"policy", "condition", "seed", "params_file", "best_tr_file", "sweep"});
    read(s, "policy", c.sim.policy, "sim");
    if (s.contains("condition")) c.sim.condition = parse_condition(s.at("condition").get<std::string>());
    read(s, "seed", c.sim.seed, "sim");
    read(s, "params_file", c.sim.params_file, "sim");
    read(s, "best_tr_file", c.sim.best_tr_file, "sim");
    if (s.contains("sweep")) {
      const json& sw = s.at("sweep");
      check_keys(sw, "sim.sweep", {"conditions", "policies"});
      if (sw.contains("conditions")) c.sim.sweep.conditions = read_conditions(sw.at("conditions"), "sim.sweep.conditions");
      read(sw, "policies", c.sim.sweep.policies, "sim.sweep");
    }
  }

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(fmt::format("config {}: {}", path, e.what()));
  }
  return config_from_json(j);
}

json to_json(const ExperimentConfig& c) {
  json model = model_to_json(c.model);
  model["calibration"] = {{"steps_condition", to_string(c.calibration.steps_condition)},
                          {"mean_retry_steps", c.calibration.mean_retry_steps},
                          {"steps_tolerance", c.calibration.steps_tolerance},
                          {"tr_condition", to_string(c.calibration.tr_condition)},
                          {"tr_reduction", c.calibration.tr_reduction},
                          {"max_evaluations", c.calibration.max_evaluations}};
  const SynthSpec& s = c.workload.synth;
  return {
      {"model", model},
      {"ecc",
       {{"correction_capability_t", c.ecc.correction_capability_t},
        {"codeword_payload_bits", c.ecc.codeword_payload_bits},
        {"codewords_per_page", c.ecc.codewords_per_page},
        {"deterministic_mode", c.ecc.deterministic_mode},
        {"guardband_sigmas", c.ecc.guardband_sigmas}}},
      {"timing",
       {{"t_r", c.timing.t_r},
        {"t_x", c.timing.t_x},
        {"t_e", c.timing.t_e},
        {"t_prog", c.timing.t_prog},
        {"t_rst", c.timing.t_rst},
        {"cache_move", c.timing.cache_move},
        {"speculative_abort", c.timing.speculative_abort == SpeculativeAbort::Reset ? "reset" : "free"}}},
      {"geometry",
       {{"channels", c.geometry.channels},
        {"chips_per_channel", c.geometry.chips_per_channel},
        {"dies_per_chip", c.geometry.dies_per_chip},
        {"page_size_kib", c.geometry.page_size_kib},
        {"pages_per_block", c.geometry.pages_per_block},
        {"blocks_per_die", c.geometry.blocks_per_die}}},
      {"retry",
       {{"step_mv", c.retry.step_mv},
        {"max_steps", c.retry.max_steps},
        {"shape", to_string(c.retry.shape)},
        {"direction", c.retry.direction},
        {"history_group_blocks", c.retry.history_group_blocks},
        {"characterize_guardband_sigmas", c.retry.characterize_guardband_sigmas},
        {"conditions", condition_list(c.retry.conditions)},
        {"tr_grid", c.retry.tr_grid}}},
      {"workload",
       {{"preset", c.workload.preset},
        {"trace", c.workload.trace},
        {"duration_us", s.duration_us},
        {"mean_iat_us", s.mean_iat_us},
        {"read_ratio", s.read_ratio},
        {"working_set_blocks", s.working_set_blocks},
        {"address_distribution", s.address == AddressDistribution::Zipf ? "zipf" : "uniform"},
        {"zipf_theta", s.zipf_theta},
        {"size_min_blocks", s.size_min_blocks},
        {"size_max_blocks", s.size_max_blocks}}},
      {"sim",
       {{"policy", c.sim.policy},
        {"condition", to_string(c.sim.condition)},
        {"seed", c.sim.seed},
        {"params_file", c.sim.params_file},
        {"best_tr_file", c.sim.best_tr_file},
        {"sweep", {{"conditions", condition_list(c.sim.sweep.conditions)}, {"policies", c.sim.sweep.policies}}}}},
  };
}

}  // namespace rrsim
