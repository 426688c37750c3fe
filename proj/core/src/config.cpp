#include "rsed/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rsed {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw PreconditionError("config: bad value for '" + key + "': '" + text + "'");
  }
  return v;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw PreconditionError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw PreconditionError("config line " + std::to_string(line_no) + ": empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open config file: " + path.string());
  return parse(in);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  used_.insert(key);
  return it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? parse_number<double>(key, *v) : fallback;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto v = get(key);
  return v ? parse_number<int>(key, *v) : fallback;
}

uint64_t KeyValueConfig::get_u64(const std::string& key, uint64_t fallback) const {
  const auto v = get(key);
  return v ? parse_number<uint64_t>(key, *v) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw PreconditionError("config: bad boolean for '" + key + "': '" + *v + "'");
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : values_) {
    if (!used_.contains(k)) out.push_back(k);
  }
  return out;
}

void apply(const KeyValueConfig& kv, TrainConfig& cfg) {
  cfg.batch_size = kv.get_int("batch_size", cfg.batch_size);
  cfg.max_epochs = kv.get_int("max_epochs", cfg.max_epochs);
  cfg.patience = kv.get_int("patience", cfg.patience);
  cfg.learning_rate = kv.get_double("learning_rate", cfg.learning_rate);
  cfg.beta1 = kv.get_double("beta1", cfg.beta1);
  cfg.beta2 = kv.get_double("beta2", cfg.beta2);
  cfg.epsilon = kv.get_double("epsilon", cfg.epsilon);
  cfg.fine_tune_epochs = kv.get_int("fine_tune_epochs", cfg.fine_tune_epochs);
  cfg.seed = kv.get_u64("seed", cfg.seed);
  cfg.threads = kv.get_int("threads", cfg.threads);
  cfg.dims.conv_channels = kv.get_int("conv_channels", cfg.dims.conv_channels);
  cfg.dims.kernel = kv.get_int("kernel", cfg.dims.kernel);
  cfg.dims.hidden = kv.get_int("hidden", cfg.dims.hidden);
  cfg.validate();
}

void apply(const KeyValueConfig& kv, SynthConfig& cfg, const std::string& prefix) {
  const auto key = [&prefix](const char* k) { return prefix + k; };
  if (auto v = kv.get(key("name"))) cfg.name = *v;
  cfg.participants = kv.get_int(key("participants"), cfg.participants);
  cfg.clips_per_participant = kv.get_int(key("clips_per_participant"), cfg.clips_per_participant);
  cfg.breath_rate_min = kv.get_double(key("breath_rate_min"), cfg.breath_rate_min);
  cfg.breath_rate_max = kv.get_double(key("breath_rate_max"), cfg.breath_rate_max);
  cfg.cas_probability = kv.get_double(key("cas_probability"), cfg.cas_probability);
  cfg.noise_level = kv.get_double(key("noise_level"), cfg.noise_level);
  cfg.event_amplitude = kv.get_double(key("event_amplitude"), cfg.event_amplitude);
  cfg.tracheal_fraction = kv.get_double(key("tracheal_fraction"), cfg.tracheal_fraction);
  if (kv.get_bool(key("shifted"), false)) cfg.bands = shifted_profile();
  auto& b = cfg.bands;
  b.inhale_lo = kv.get_double(key("inhale_lo"), b.inhale_lo);
  b.inhale_hi = kv.get_double(key("inhale_hi"), b.inhale_hi);
  b.exhale_lo = kv.get_double(key("exhale_lo"), b.exhale_lo);
  b.exhale_hi = kv.get_double(key("exhale_hi"), b.exhale_hi);
  b.cas_lo = kv.get_double(key("cas_lo"), b.cas_lo);
  b.cas_hi = kv.get_double(key("cas_hi"), b.cas_hi);
  cfg.validate();
}

void apply(const KeyValueConfig& kv, BaselineConfig& cfg) {
  cfg.band_for_task[0] = kv.get_int("baseline.band_I", cfg.band_for_task[0]);
  cfg.band_for_task[1] = kv.get_int("baseline.band_E", cfg.band_for_task[1]);
  cfg.band_for_task[2] = kv.get_int("baseline.band_C", cfg.band_for_task[2]);
  cfg.gain = kv.get_double("baseline.gain", cfg.gain);
  cfg.offset = kv.get_double("baseline.offset", cfg.offset);
}

void write_config(std::ostream& os, const TrainConfig& cfg) {
  std::ostringstream s;
  s.precision(17);
  s << "batch_size = " << cfg.batch_size << '\n'
    << "max_epochs = " << cfg.max_epochs << '\n'
    << "patience = " << cfg.patience << '\n'
    << "learning_rate = " << cfg.learning_rate << '\n'
    << "beta1 = " << cfg.beta1 << '\n'
    << "beta2 = " << cfg.beta2 << '\n'
    << "epsilon = " << cfg.epsilon << '\n'
    << "fine_tune_epochs = " << cfg.fine_tune_epochs << '\n'
    << "seed = " << cfg.seed << '\n'
    << "conv_channels = " << cfg.dims.conv_channels << '\n'
    << "kernel = " << cfg.dims.kernel << '\n'
    << "hidden = " << cfg.dims.hidden << '\n';
  os << s.str();
}

std::vector<EventKind> parse_tasks(const std::string& csv) {
  std::vector<EventKind> out;
  std::istringstream in(csv);
  for (std::string tok; std::getline(in, tok, ',');) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      const EventKind k = parse_kind(tok);
      if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    } catch (const DataError&) {
      throw PreconditionError("unknown task '" + tok + "' (expected I, E or C)");
    }
  }
  if (out.empty()) throw PreconditionError("no tasks given");
  return out;
}

}  // namespace rsed
