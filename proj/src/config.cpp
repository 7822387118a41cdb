#include "olrg/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace olrg::cli {

namespace {

struct Value {
  enum class Kind { number, boolean, string, array } kind;
  double num = 0.0;
  bool flag = false;
  std::string text;
  std::vector<double> arr;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

double parse_number(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid number for key '" + key + "': " + text);
  }
  if (used != text.size())
    throw ConfigError("invalid number for key '" + key + "': " + text);
  return v;
}

Value parse_value(const std::string& raw, const std::string& key) {
  Value v{Value::Kind::number};
  const std::string text = trim(raw);
  if (text.empty()) throw ConfigError("missing value for key '" + key + "'");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"')
      throw ConfigError("unterminated string for key '" + key + "'");
    v.kind = Value::Kind::string;
    v.text = text.substr(1, text.size() - 2);
    return v;
  }
  if (text == "true" || text == "false") {
    v.kind = Value::Kind::boolean;
    v.flag = text == "true";
    return v;
  }
  if (text.front() == '[') {
    if (text.back() != ']')
      throw ConfigError("unterminated array for key '" + key + "'");
    v.kind = Value::Kind::array;
    std::stringstream ss(text.substr(1, text.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      v.arr.push_back(parse_number(item, key));
    }
    return v;
  }
  v.num = parse_number(text, key);
  return v;
}

int as_int(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::number)
    throw ConfigError("expected an integer for key '" + key + "'");
  return static_cast<int>(v.num);
}

double as_double(const Value& v, const std::string& key) {
  if (v.kind != Value::Kind::number)
    throw ConfigError("expected a number for key '" + key + "'");
  return v.num;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  bool schema_seen = false;
  std::string section;
  std::istringstream in(text);
  std::string raw;

  while (std::getline(in, raw)) {
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "loss" && section != "map" &&
          section != "train" && section != "output")
        throw ConfigError("unknown section: [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value, got: " + line);
    const std::string key = trim(line.substr(0, eq));
    const Value value = parse_value(line.substr(eq + 1), key);
    const std::string path = section.empty() ? key : section + "." + key;

    if (path == "schema") {
      if (as_int(value, path) != 1)
        throw ConfigError("unsupported schema version");
      schema_seen = true;
    } else if (path == "model.h") {
      cfg.h = as_double(value, path);
    } else if (path == "model.start_n") {
      cfg.start_n = as_int(value, path);
    } else if (path == "model.target_N") {
      cfg.target_n = as_int(value, path);
    } else if (path == "model.grow_l") {
      cfg.grow_l = as_int(value, path);
    } else if (path == "model.obs_a") {
      cfg.obs_a = as_int(value, path);
    } else if (path == "model.obs_b") {
      cfg.obs_b = as_int(value, path);
    } else if (path == "loss.order") {
      cfg.order = as_int(value, path);
    } else if (path == "loss.tobc_batch") {
      cfg.tobc_batch = as_int(value, path);
    } else if (path == "loss.checkpoints") {
      cfg.checkpoints = as_int(value, path);
    } else if (path == "loss.T") {
      cfg.total_time = as_double(value, path);
    } else if (path == "loss.times") {
      if (value.kind != Value::Kind::array)
        throw ConfigError("loss.times must be an array");
      cfg.times = value.arr;
    } else if (path == "map.mode") {
      if (value.text != "omm" && value.text != "hem")
        throw ConfigError("map.mode must be \"omm\" or \"hem\"");
      cfg.mode = value.text;
    } else if (path == "map.depth") {
      cfg.depth = as_int(value, path);
    } else if (path == "map.width") {
      cfg.width = as_int(value, path);
    } else if (path == "map.noise_dim") {
      cfg.noise_dim = as_int(value, path);
    } else if (path == "map.ensemble_size") {
      cfg.ensemble_size = as_int(value, path);
    } else if (path == "map.identity_embedding") {
      if (value.kind != Value::Kind::boolean)
        throw ConfigError("map.identity_embedding must be a boolean");
      cfg.identity_embedding = value.flag;
    } else if (path == "train.epochs") {
      cfg.epochs = as_int(value, path);
    } else if (path == "train.lr") {
      cfg.learning_rate = as_double(value, path);
    } else if (path == "train.seed") {
      cfg.seed = static_cast<std::uint64_t>(as_double(value, path));
    } else if (path == "train.window") {
      cfg.window = as_int(value, path);
    } else if (path == "train.grad") {
      if (value.text != "adjoint" && value.text != "finite_diff")
        throw ConfigError("train.grad must be \"adjoint\" or \"finite_diff\"");
      cfg.grad = value.text;
    } else if (path == "train.fd_eps") {
      cfg.fd_eps = as_double(value, path);
    } else if (path == "train.epochs_per_point") {
      cfg.epochs_per_point = as_int(value, path);
    } else if (path == "train.snapshot_interval") {
      cfg.snapshot_interval = as_int(value, path);
    } else if (path == "train.substeps") {
      cfg.substeps = as_int(value, path);
    } else if (path == "output.directory") {
      if (value.kind != Value::Kind::string)
        throw ConfigError("output.directory must be a string");
      cfg.output_dir = value.text;
    } else {
      throw ConfigError("unknown key: " + path);
    }
  }
  if (!schema_seen) throw ConfigError("missing required key: schema");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

train::TrainConfig ExperimentConfig::to_train_config() const {
  train::TrainConfig t;
  t.mode = mode == "omm" ? train::MapMode::omm : train::MapMode::hem;
  t.order = order;
  t.tobc_batch = tobc_batch;
  t.checkpoints = checkpoints;
  t.total_time = total_time;
  t.h = h;
  t.start_n = start_n;
  t.target_n = target_n;
  t.grow_l = grow_l;
  t.epochs = epochs;
  t.learning_rate = learning_rate;
  t.seed = seed;
  t.moving_avg_window = window;
  t.grad_method = grad == "adjoint" ? train::GradMethod::adjoint
                                    : train::GradMethod::finite_diff;
  t.fd_eps = fd_eps;
  t.snapshot_interval = snapshot_interval;
  t.depth = depth;
  t.width = width;
  t.noise_dim = noise_dim;
  t.ensemble_size = ensemble_size;
  t.substeps = substeps;
  t.identity_embedding = identity_embedding;
  t.transfer_times = times;
  t.epochs_per_point = epochs_per_point;
  t.validate();
  return t;
}

}  // namespace olrg::cli
