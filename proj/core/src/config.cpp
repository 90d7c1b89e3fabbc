#include "sumdca/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sumdca/errors.hpp"

namespace sumdca {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ContractError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ContractError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ContractError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view recon_name(ReconSigmoid r) {
  switch (r) {
    case ReconSigmoid::kAuto: return "auto";
    case ReconSigmoid::kOn: return "on";
    case ReconSigmoid::kOff: return "off";
  }
  return "auto";
}

ReconSigmoid parse_recon(const std::string& v) {
  if (v == "auto") return ReconSigmoid::kAuto;
  if (v == "on") return ReconSigmoid::kOn;
  if (v == "off") return ReconSigmoid::kOff;
  throw ContractError("config: 'recon_sigmoid' expects auto, on or off, got '" + v + "'");
}

template <typename Parse>
auto wrap(const std::string& key, Parse parse) {
  try {
    return parse();
  } catch (const ContractError& e) {
    throw ContractError("config: '" + key + "': " + e.what());
  }
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ContractError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ContractError("config line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return out;
}

void apply_config(TrainConfig& c, const std::map<std::string, std::string>& entries) {
  for (const auto& [key, v] : entries) {
    ModelConfig& m = c.model;
    if (key == "feature_dim") m.feature_dim = to_uint(key, v);
    else if (key == "hidden_dim") m.hidden_dim = to_uint(key, v);
    else if (key == "similarity") m.similarity = wrap(key, [&] { return parse_similarity(v); });
    else if (key == "scale_q") m.scale_q = to_double(key, v);
    else if (key == "neighbor_radius") m.neighbor_radius = to_uint(key, v);
    else if (key == "lca_variant") m.lca_variant = wrap(key, [&] { return parse_lca_variant(v); });
    else if (key == "window_policy") m.window = wrap(key, [&] { return parse_window_policy(v); });
    else if (key == "use_gda") m.use_gda = to_bool(key, v);
    else if (key == "use_lca") m.use_lca = to_bool(key, v);
    else if (key == "use_positions") m.use_positions = to_bool(key, v);
    else if (key == "recon_sigmoid") m.recon_sigmoid = parse_recon(v);
    else if (key == "alpha") c.loss.alpha = to_double(key, v);
    else if (key == "beta") c.loss.beta = to_double(key, v);
    else if (key == "supervised") c.loss.supervised = to_bool(key, v);
    else if (key == "use_repelling") c.loss.use_repelling = to_bool(key, v);
    else if (key == "use_reconstruction") c.loss.use_reconstruction = to_bool(key, v);
    else if (key == "learning_rate") c.learning_rate = to_double(key, v);
    else if (key == "weight_decay") c.weight_decay = to_double(key, v);
    else if (key == "epochs") c.epochs = to_uint(key, v);
    else if (key == "seed") c.seed = to_uint(key, v);
    else if (key == "adam_beta1") c.adam_beta1 = to_double(key, v);
    else if (key == "adam_beta2") c.adam_beta2 = to_double(key, v);
    else if (key == "adam_epsilon") c.adam_epsilon = to_double(key, v);
    else if (key == "early_stop") c.early_stop = to_bool(key, v);
    else if (key == "patience") c.patience = to_uint(key, v);
    else if (key == "min_delta") c.min_delta = to_double(key, v);
    else throw ContractError("config: unknown key '" + key + "'");
  }
}

std::string format_config(const TrainConfig& c) {
  const ModelConfig& m = c.model;
  std::ostringstream out;
  auto b = [](bool v) { return v ? "true" : "false"; };
  out << "feature_dim = " << m.feature_dim << '\n'
      << "hidden_dim = " << m.hidden_dim << '\n'
      << "similarity = " << to_string(m.similarity) << '\n'
      << "scale_q = " << fmt(m.scale_q) << '\n'
      << "neighbor_radius = " << m.neighbor_radius << '\n'
      << "lca_variant = " << to_string(m.lca_variant) << '\n'
      << "window_policy = " << to_string(m.window) << '\n'
      << "use_gda = " << b(m.use_gda) << '\n'
      << "use_lca = " << b(m.use_lca) << '\n'
      << "use_positions = " << b(m.use_positions) << '\n'
      << "recon_sigmoid = " << recon_name(m.recon_sigmoid) << '\n'
      << "alpha = " << fmt(c.loss.alpha) << '\n'
      << "beta = " << fmt(c.loss.beta) << '\n'
      << "supervised = " << b(c.loss.supervised) << '\n'
      << "use_repelling = " << b(c.loss.use_repelling) << '\n'
      << "use_reconstruction = " << b(c.loss.use_reconstruction) << '\n'
      << "learning_rate = " << fmt(c.learning_rate) << '\n'
      << "weight_decay = " << fmt(c.weight_decay) << '\n'
      << "epochs = " << c.epochs << '\n'
      << "seed = " << c.seed << '\n'
      << "adam_beta1 = " << fmt(c.adam_beta1) << '\n'
      << "adam_beta2 = " << fmt(c.adam_beta2) << '\n'
      << "adam_epsilon = " << fmt(c.adam_epsilon) << '\n'
      << "early_stop = " << b(c.early_stop) << '\n'
      << "patience = " << c.patience << '\n'
      << "min_delta = " << fmt(c.min_delta) << '\n';
  return out.str();
}

TrainConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(DataErrorKind::kIo, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  TrainConfig c;
  apply_config(c, parse_key_values(buf.str()));
  return c;
}

}  // namespace sumdca
