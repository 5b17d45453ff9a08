#include "run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fcodt/errors.hpp"
#include "json.hpp"

namespace fcodt::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ContractViolation(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      throw ContractViolation("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void read(const json& obj, const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("config key '") + key + "': " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ContractViolation(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc,
                 {"methods", "datasets", "depths", "sample_sizes", "repeats", "lambda_grid", "seed",
                  "folds", "criteria", "sim_train", "sim_test", "sim_sigma", "sim_bench_n",
                  "train_fraction", "retune_lambda", "minmax_scale", "workers", "manifest",
                  "output_dir", "reference"},
                 "config");
  RunConfig rc;
  ExperimentConfig& e = rc.experiment;
  if (doc.contains("methods")) {
    std::vector<std::string> names;
    read(doc, "methods", names);
    e.methods.clear();
    for (const auto& n : names) e.methods.push_back(parse_method(n));
  }
  read(doc, "datasets", e.datasets);
  read(doc, "depths", e.depths);
  read(doc, "sample_sizes", e.sample_sizes);
  read(doc, "repeats", e.repeats);
  read(doc, "lambda_grid", e.lambda_grid);
  read(doc, "seed", e.seed_base);
  read(doc, "folds", e.folds);
  read(doc, "sim_train", e.sim_train);
  read(doc, "sim_test", e.sim_test);
  read(doc, "sim_sigma", e.sim_sigma);
  read(doc, "sim_bench_n", e.sim_bench_n);
  read(doc, "train_fraction", e.train_fraction);
  read(doc, "retune_lambda", e.retune_lambda);
  read(doc, "minmax_scale", e.minmax_scale);
  read(doc, "workers", e.workers);
  if (doc.contains("criteria")) {
    const json& c = doc.at("criteria");
    reject_unknown(c, {"max_depth", "min_samples_split", "min_samples_leaf", "min_gain"},
                   "config.criteria");
    read(c, "max_depth", e.criteria.max_depth);
    read(c, "min_samples_split", e.criteria.min_samples_split);
    read(c, "min_samples_leaf", e.criteria.min_samples_leaf);
    read(c, "min_gain", e.criteria.min_gain);
  }
  std::string s;
  if (doc.contains("manifest")) read(doc, "manifest", s), rc.manifest = resolve(base_dir, s);
  if (doc.contains("output_dir")) read(doc, "output_dir", s), rc.output_dir = resolve(base_dir, s);
  if (doc.contains("reference")) read(doc, "reference", s), rc.reference = resolve(base_dir, s);
  e.validate();
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

std::string canonical_json(const RunConfig& rc) {
  const ExperimentConfig& e = rc.experiment;
  json j;
  std::vector<std::string> methods;
  for (Method m : e.methods) methods.emplace_back(method_name(m));
  j["methods"] = methods;
  j["datasets"] = e.datasets;
  j["depths"] = e.depths;
  j["sample_sizes"] = e.sample_sizes;
  j["repeats"] = e.repeats;
  j["lambda_grid"] = e.lambda_grid;
  j["seed"] = e.seed_base;
  j["folds"] = e.folds;
  j["criteria"] = {{"max_depth", e.criteria.max_depth},
                   {"min_samples_split", e.criteria.min_samples_split},
                   {"min_samples_leaf", e.criteria.min_samples_leaf},
                   {"min_gain", e.criteria.min_gain}};
  j["sim_train"] = e.sim_train;
  j["sim_test"] = e.sim_test;
  j["sim_sigma"] = e.sim_sigma;
  j["sim_bench_n"] = e.sim_bench_n;
  j["train_fraction"] = e.train_fraction;
  j["retune_lambda"] = e.retune_lambda;
  j["minmax_scale"] = e.minmax_scale;
  // workers and paths do not change results and stay out of the hash
  return j.dump();
}

}  // namespace fcodt::cli
