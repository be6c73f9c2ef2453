#include "geomap/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "geomap/errors.hpp"

namespace geomap {

ExperimentConfig::ExperimentConfig() {
  for (const char* name : {"svm", "1nn", "3nn", "5nn", "ldc", "qdc", "tree"})
    classifiers.push_back(ClassifierSpec::parse(name));
  dr_methods = {DrKind::PCA, DrKind::LDA, DrKind::KPCA, DrKind::MFA};
  for (int d = 20; d <= 60; d += 5) dr_dims.push_back(d);
  neighbor_grid = {3, 5, 7, 9, 11, 13};
  train_size_grid = {5, 8, 10, 15, 20};
}

void ExperimentConfig::validate() const {
  if (dataset.empty()) throw ConfigError("dataset must be set");
  if (dataset_format != "auto" && dataset_format != "csv" && dataset_format != "hsb")
    throw ConfigError("dataset.format must be auto, csv or hsb");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (split.train_per_class < 1) throw ConfigError("split.train_per_class must be >= 1");
  if (gam.v_w < 1 || gam.v_b < 1) throw ConfigError("gam.v_w and gam.v_b must be >= 1");
  if (gam.restarts < 1) throw ConfigError("gam.restarts must be >= 1");
  if (gam.target_dim && *gam.target_dim < 1) throw ConfigError("gam.target_dim must be >= 1");
  gam.cg.validate();
  if (classifiers.empty()) throw ConfigError("classifiers must not be empty");
  if (kpca_gamma < 0.0) throw ConfigError("kpca.gamma must be >= 0");
  if (mfa_k1 < 1 || mfa_k2 < 1) throw ConfigError("mfa.k1 and mfa.k2 must be >= 1");
  if (classifier_options.svm.c <= 0.0) throw ConfigError("svm.c must be positive");
  for (int v : neighbor_grid)
    if (v < 1) throw ConfigError("sweep.neighbors entries must be >= 1");
  for (int v : dr_dims)
    if (v < 1) throw ConfigError("dr.dims entries must be >= 1");
  for (int v : train_size_grid)
    if (v < 1) throw ConfigError("sweep.train_sizes entries must be >= 1");
  for (int v : dimension_grid)
    if (v < 1) throw ConfigError("sweep.dims entries must be >= 1");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty())
    throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("invalid boolean '" + value + "' for key '" + key + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const auto& item : split_list(value)) {
    if (item.find(':') == std::string::npos) {
      out.push_back(parse_number<int>(key, item));
      continue;
    }
    std::vector<int> parts;
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(parse_number<int>(key, trim(part)));
    if (parts.size() != 3 || parts[2] == 0)
      throw ConfigError("range '" + item + "' for key '" + key + "' must be first:last:step with step != 0");
    for (int v = parts[0]; parts[2] > 0 ? v <= parts[1] : v >= parts[1]; v += parts[2]) out.push_back(v);
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& to_str) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + to_str(items[i]);
  return out;
}

}  // namespace

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  auto i = [&] { return parse_number<int>(key, value); };
  auto d = [&] { return parse_number<double>(key, value); };
  auto u = [&] { return parse_number<std::uint64_t>(key, value); };

  if (key == "dataset") cfg.dataset = value;
  else if (key == "dataset.format") cfg.dataset_format = value;
  else if (key == "synthetic.classes") cfg.synthetic.classes = i();
  else if (key == "synthetic.dim") cfg.synthetic.dim = i();
  else if (key == "synthetic.per_class") cfg.synthetic.per_class = i();
  else if (key == "synthetic.separation") cfg.synthetic.separation = d();
  else if (key == "synthetic.noisy_dims") cfg.synthetic.noisy_dims = i();
  else if (key == "synthetic.noise_std") cfg.synthetic.noise_std = d();
  else if (key == "synthetic.rotate") cfg.synthetic.rotate = parse_bool(key, value);
  else if (key == "synthetic.seed") cfg.synthetic.seed = u();
  else if (key == "standardize") cfg.standardize = parse_bool(key, value);
  else if (key == "gam.v_w") cfg.gam.v_w = i();
  else if (key == "gam.v_b") cfg.gam.v_b = i();
  else if (key == "gam.neighbors") cfg.gam.v_w = cfg.gam.v_b = i();
  else if (key == "gam.target_dim") {
    if (value == "auto") cfg.gam.target_dim.reset();
    else cfg.gam.target_dim = i();
  } else if (key == "gam.restarts") cfg.gam.restarts = i();
  else if (key == "gam.seed") cfg.gam.seed = u();
  else if (key == "cg.max_iters") cfg.gam.cg.max_iters = i();
  else if (key == "cg.grad_tol") cfg.gam.cg.grad_tol = d();
  else if (key == "cg.armijo_c1") cfg.gam.cg.armijo_c1 = d();
  else if (key == "cg.backtrack_factor") cfg.gam.cg.backtrack_factor = d();
  else if (key == "cg.max_backtracks") cfg.gam.cg.max_backtracks = i();
  else if (key == "cg.initial_step") cfg.gam.cg.initial_step = d();
  else if (key == "split.train_per_class") cfg.split.train_per_class = i();
  else if (key == "split.seed") cfg.split.seed = u();
  else if (key == "trials") cfg.trials = i();
  else if (key == "classifiers") {
    cfg.classifiers.clear();
    for (const auto& name : split_list(value)) cfg.classifiers.push_back(ClassifierSpec::parse(name));
  } else if (key == "svm.c") cfg.classifier_options.svm.c = d();
  else if (key == "svm.tol") cfg.classifier_options.svm.tol = d();
  else if (key == "svm.max_epochs") cfg.classifier_options.svm.max_epochs = i();
  else if (key == "svm.seed") cfg.classifier_options.svm.seed = u();
  else if (key == "tree.max_depth") cfg.classifier_options.tree.max_depth = i();
  else if (key == "tree.min_samples_split") cfg.classifier_options.tree.min_samples_split = i();
  else if (key == "dr.methods") {
    cfg.dr_methods.clear();
    for (const auto& name : split_list(value)) cfg.dr_methods.push_back(parse_dr_kind(name));
  } else if (key == "dr.dims") cfg.dr_dims = parse_int_list(key, value);
  else if (key == "kpca.gamma") cfg.kpca_gamma = d();
  else if (key == "mfa.k1") cfg.mfa_k1 = i();
  else if (key == "mfa.k2") cfg.mfa_k2 = i();
  else if (key == "sweep.neighbors") cfg.neighbor_grid = parse_int_list(key, value);
  else if (key == "sweep.dims") cfg.dimension_grid = parse_int_list(key, value);
  else if (key == "sweep.train_sizes") cfg.train_size_grid = parse_int_list(key, value);
  else if (key == "output") cfg.output = value;
  else if (key == "verbose") cfg.verbose = parse_bool(key, value);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    try {
      apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  auto kv = [&out](const char* key, const std::string& value) { out << key << " = " << value << '\n'; };
  auto num = [](auto v) { return std::to_string(v); };
  auto ints = [&](const std::vector<int>& v) { return join(v, num); };
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };

  kv("dataset", cfg.dataset);
  kv("dataset.format", cfg.dataset_format);
  kv("synthetic.classes", num(cfg.synthetic.classes));
  kv("synthetic.dim", num(cfg.synthetic.dim));
  kv("synthetic.per_class", num(cfg.synthetic.per_class));
  kv("synthetic.separation", fmt(cfg.synthetic.separation));
  kv("synthetic.noisy_dims", num(cfg.synthetic.noisy_dims));
  kv("synthetic.noise_std", fmt(cfg.synthetic.noise_std));
  kv("synthetic.rotate", flag(cfg.synthetic.rotate));
  kv("synthetic.seed", num(cfg.synthetic.seed));
  kv("standardize", flag(cfg.standardize));
  kv("gam.v_w", num(cfg.gam.v_w));
  kv("gam.v_b", num(cfg.gam.v_b));
  kv("gam.target_dim", cfg.gam.target_dim ? num(*cfg.gam.target_dim) : "auto");
  kv("gam.restarts", num(cfg.gam.restarts));
  kv("gam.seed", num(cfg.gam.seed));
  kv("cg.max_iters", num(cfg.gam.cg.max_iters));
  kv("cg.grad_tol", fmt(cfg.gam.cg.grad_tol));
  kv("cg.armijo_c1", fmt(cfg.gam.cg.armijo_c1));
  kv("cg.backtrack_factor", fmt(cfg.gam.cg.backtrack_factor));
  kv("cg.max_backtracks", num(cfg.gam.cg.max_backtracks));
  kv("cg.initial_step", fmt(cfg.gam.cg.initial_step));
  kv("split.train_per_class", num(cfg.split.train_per_class));
  kv("split.seed", num(cfg.split.seed));
  kv("trials", num(cfg.trials));
  kv("classifiers", join(cfg.classifiers, [](const ClassifierSpec& s) { return s.name(); }));
  kv("svm.c", fmt(cfg.classifier_options.svm.c));
  kv("svm.tol", fmt(cfg.classifier_options.svm.tol));
  kv("svm.max_epochs", num(cfg.classifier_options.svm.max_epochs));
  kv("svm.seed", num(cfg.classifier_options.svm.seed));
  kv("tree.max_depth", num(cfg.classifier_options.tree.max_depth));
  kv("tree.min_samples_split", num(cfg.classifier_options.tree.min_samples_split));
  kv("dr.methods", join(cfg.dr_methods, [](DrKind k) { return to_string(k); }));
  kv("dr.dims", ints(cfg.dr_dims));
  kv("kpca.gamma", fmt(cfg.kpca_gamma));
  kv("mfa.k1", num(cfg.mfa_k1));
  kv("mfa.k2", num(cfg.mfa_k2));
  kv("sweep.neighbors", ints(cfg.neighbor_grid));
  kv("sweep.dims", ints(cfg.dimension_grid));
  kv("sweep.train_sizes", ints(cfg.train_size_grid));
  kv("output", cfg.output);
  kv("verbose", flag(cfg.verbose));
  return out.str();
}

LabeledDataset load_experiment_dataset(const ExperimentConfig& cfg) {
  if (cfg.dataset == "synthetic") return gaussian_benchmark(cfg.synthetic);
  if (cfg.dataset_format == "csv") return load_csv(cfg.dataset);
  if (cfg.dataset_format == "hsb") return load_hsb(cfg.dataset);
  return load_dataset(cfg.dataset);
}

}  // namespace geomap
