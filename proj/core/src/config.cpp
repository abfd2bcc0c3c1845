#include "batchtail/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "batchtail/errors.hpp"

namespace batchtail {

using nlohmann::json;

namespace {

NoiseModel parse_noise(const json& j, std::vector<std::string>& bad, const std::string& key) {
  NoiseModel m;
  if (!j.is_object() || !j.contains("family")) {
    bad.push_back(key + ".family");
    return m;
  }
  const std::string fam = j.at("family").get<std::string>();
  try {
    if (fam == "normal") {
      m = NoiseModel::normal();
    } else if (fam == "gamma") {
      m = NoiseModel::gamma(j.at("shape").get<double>(), j.at("scale").get<double>());
    } else if (fam == "mixture") {
      m = NoiseModel::mixture(j.at("weight").get<double>(), j.at("mean1").get<double>(),
                              j.at("var1").get<double>(), j.at("mean2").get<double>(),
                              j.at("var2").get<double>());
    } else {
      bad.push_back(key + ".family");
    }
  } catch (const json::exception&) {
    bad.push_back(key);
  } catch (const parameter_error&) {
    bad.push_back(key);
  }
  return m;
}

Policy parse_policy(const json& j, std::vector<std::string>& bad, const std::string& key) {
  Policy p;
  if (!j.is_object() || !j.contains("type")) {
    bad.push_back(key + ".type");
    return p;
  }
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "fixed") {
      const auto probs = j.at("probs").get<std::vector<double>>();
      if (probs.size() != 2) throw parameter_error("probs must have two entries");
      p = Policy::fixed({probs[0], probs[1]});
    } else if (type == "eps_greedy") {
      p = Policy::eps_greedy(j.at("clip").get<double>());
    } else if (type == "threshold") {
      auto arr = [&](const char* name) {
        const auto v = j.at(name).get<std::vector<double>>();
        if (v.size() != 2) throw parameter_error("probs must have two entries");
        return std::array<double, 2>{v[0], v[1]};
      };
      p = Policy::threshold(j.at("a1").get<double>(), j.at("a2").get<double>(),
                            arr("probs_low"), arr("probs_mid"), arr("probs_high"));
    } else {
      bad.push_back(key + ".type");
    }
  } catch (const json::exception&) {
    bad.push_back(key);
  } catch (const parameter_error&) {
    bad.push_back(key);
  }
  return p;
}

json noise_to_json(const NoiseModel& m) {
  json j;
  switch (m.family) {
    case NoiseModel::Family::normal:
      j["family"] = "normal";
      break;
    case NoiseModel::Family::gamma:
      j["family"] = "gamma";
      j["shape"] = m.shape;
      j["scale"] = m.scale;
      break;
    case NoiseModel::Family::mixture:
      j["family"] = "mixture";
      j["weight"] = m.weight;
      j["mean1"] = m.mean1;
      j["var1"] = m.var1;
      j["mean2"] = m.mean2;
      j["var2"] = m.var2;
      break;
  }
  return j;
}

json policy_to_json(const Policy& p) {
  json j;
  switch (p.kind) {
    case Policy::Kind::fixed:
      j["type"] = "fixed";
      j["probs"] = {p.probs[0], p.probs[1]};
      break;
    case Policy::Kind::eps_greedy:
      j["type"] = "eps_greedy";
      j["clip"] = p.clip;
      break;
    case Policy::Kind::threshold:
      j["type"] = "threshold";
      j["a1"] = p.a1;
      j["a2"] = p.a2;
      j["probs_low"] = {p.probs_low[0], p.probs_low[1]};
      j["probs_mid"] = {p.probs_mid[0], p.probs_mid[1]};
      j["probs_high"] = {p.probs_high[0], p.probs_high[1]};
      break;
  }
  return j;
}

}  // namespace

DesignConfig load_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw validation_error(std::string("config is not valid JSON: ") + e.what(), {});
  }

  std::vector<std::string> bad;
  DesignConfig cfg;

  for (const char* req : {"stages", "n", "noise", "stage1_probs", "seed"}) {
    if (!j.contains(req)) bad.push_back(req);
  }
  if (!bad.empty()) {
    throw validation_error("config is missing required keys", bad);
  }

  try {
    cfg.stages = j.at("stages").get<int>();
  } catch (const json::exception&) {
    bad.push_back("stages");
  }
  try {
    cfg.n = j.at("n").get<std::vector<int>>();
  } catch (const json::exception&) {
    bad.push_back("n");
  }
  const NoiseModel noise = parse_noise(j.at("noise"), bad, "noise");
  try {
    const auto probs = j.at("stage1_probs").get<std::vector<double>>();
    if (probs.size() != 2) {
      bad.push_back("stage1_probs");
    } else {
      cfg.stage1_probs = {probs[0], probs[1]};
    }
  } catch (const json::exception&) {
    bad.push_back("stage1_probs");
  }
  try {
    cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception&) {
    bad.push_back("seed");
  }

  if (j.contains("stage2_policy")) {
    cfg.stage2_policy = parse_policy(j.at("stage2_policy"), bad, "stage2_policy");
  } else if (cfg.stages >= 2) {
    bad.push_back("stage2_policy");
  }
  if (j.contains("min_arm_count")) {
    try {
      cfg.min_arm_count = j.at("min_arm_count").get<int>();
    } catch (const json::exception&) {
      bad.push_back("min_arm_count");
    }
  }
  if (j.contains("expansion")) {
    const auto& e = j.at("expansion");
    try {
      if (e.contains("order")) cfg.expansion.order = e.at("order").get<int>();
      if (e.contains("reduced")) cfg.expansion.reduced = e.at("reduced").get<bool>();
    } catch (const json::exception&) {
      bad.push_back("expansion");
    }
  }
  if (j.contains("is")) {
    const auto& e = j.at("is");
    try {
      if (e.contains("draws")) cfg.is.draws = e.at("draws").get<std::int64_t>();
      if (e.contains("scale_p")) cfg.is.scale_p = e.at("scale_p").get<double>();
    } catch (const json::exception&) {
      bad.push_back("is");
    }
  }
  if (j.contains("mc")) {
    const auto& e = j.at("mc");
    try {
      if (e.contains("reps")) cfg.mc.reps = e.at("reps").get<std::int64_t>();
    } catch (const json::exception&) {
      bad.push_back("mc");
    }
  }
  if (j.contains("alphas")) {
    try {
      cfg.alphas = j.at("alphas").get<std::vector<double>>();
    } catch (const json::exception&) {
      bad.push_back("alphas");
    }
  }
  if (j.contains("threads")) {
    try {
      cfg.threads = j.at("threads").get<int>();
    } catch (const json::exception&) {
      bad.push_back("threads");
    }
  }

  if (!bad.empty()) throw validation_error("config schema violations", bad);

  cfg.noise.assign(cfg.stages > 0 ? cfg.stages : 0, noise);
  try {
    cfg.validate();
  } catch (const error& e) {
    throw validation_error(std::string("config invalid: ") + e.what(), {});
  }
  return cfg;
}

DesignConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config file: " + path, {});
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

void apply_overrides(DesignConfig& config, const Overrides& ov) {
  if (ov.reps >= 0) config.mc.reps = ov.reps;
  if (ov.is_draws >= 0) config.is.draws = ov.is_draws;
  if (ov.seed >= 0) config.seed = static_cast<std::uint64_t>(ov.seed);
  if (ov.threads >= 0) config.threads = ov.threads;
  if (!ov.alphas.empty()) config.alphas = ov.alphas;
  config.validate();
}

std::string config_to_json(const DesignConfig& config) {
  json j;
  j["stages"] = config.stages;
  j["n"] = config.n;
  j["noise"] = noise_to_json(config.noise.empty() ? NoiseModel::normal() : config.noise[0]);
  j["stage1_probs"] = {config.stage1_probs[0], config.stage1_probs[1]};
  if (config.stages >= 2) j["stage2_policy"] = policy_to_json(config.stage2_policy);
  j["min_arm_count"] = config.min_arm_count;
  j["expansion"] = {{"order", config.expansion.order}, {"reduced", config.expansion.reduced}};
  j["is"] = {{"draws", config.is.draws}, {"scale_p", config.is.scale_p}};
  j["mc"] = {{"reps", config.mc.reps}};
  j["alphas"] = config.alphas;
  j["seed"] = config.seed;
  return j.dump(2);
}

std::string config_digest(const DesignConfig& config) {
  const std::string text = config_to_json(config);
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace batchtail
