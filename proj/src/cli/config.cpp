#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "qcmt/cli.hpp"
#include "qcmt/koopman.hpp"

namespace qcmt::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string at(const std::string& base, std::size_t k) {
  return base + "[" + std::to_string(k) + "]";
}

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed,
                    const std::string& path) {
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw ConfigError(join(path, item.key()), "unknown field");
  }
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

double number_or(const Json& obj, const char* key, const std::string& path, double fallback) {
  return obj.contains(key) ? number(obj[key], join(path, key)) : fallback;
}

Complex complex_number(const Json& j, const std::string& path) {
  if (j.is_number()) return number(j, path);
  if (j.is_array() && j.size() == 2) {
    return {number(j[0], at(path, 0)), number(j[1], at(path, 1))};
  }
  throw ConfigError(path, "expected a number or an [re, im] pair");
}

std::pair<double, double> real_pair(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected a [a, b] pair");
  return {number(j[0], at(path, 0)), number(j[1], at(path, 1))};
}

std::vector<double> number_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], at(path, k)));
  return out;
}

std::vector<std::string> string_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_string()) throw ConfigError(at(path, k), "expected a string");
    out.push_back(j[k].get<std::string>());
  }
  return out;
}

std::size_t count(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError(path, "expected a non-negative integer");
  }
  return static_cast<std::size_t>(j.get<long long>());
}

void check_tag(const std::string& tag, const std::string& path) {
  if (tag.empty() || tag == "V" || tag.find('*') != std::string::npos) {
    throw ConfigError(path, "index names must be non-empty, not 'V', and contain no '*'");
  }
}

MatrixKernelConfig parse_matrix(const Json& j, const std::string& path) {
  reject_unknown(j, {"type", "indices", "involution", "entries"}, path);
  MatrixKernelConfig out;
  if (!j.contains("indices")) throw ConfigError(join(path, "indices"), "required field missing");
  out.indices = string_list(j["indices"], join(path, "indices"));
  for (std::size_t k = 0; k < out.indices.size(); ++k) check_tag(out.indices[k], at(join(path, "indices"), k));

  const auto n = static_cast<Eigen::Index>(out.indices.size());
  const std::string epath = join(path, "entries");
  if (!j.contains("entries")) {
    if (n != 0) throw ConfigError(epath, "required field missing");
    out.entries.resize(0, 0);
  } else {
    const Json& rows = j["entries"];
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
      throw ConfigError(epath, "expected " + std::to_string(n) + " rows");
    }
    out.entries.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Json& row = rows[static_cast<std::size_t>(r)];
      const std::string rpath = at(epath, static_cast<std::size_t>(r));
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        throw ConfigError(rpath, "expected " + std::to_string(n) + " entries");
      }
      for (Eigen::Index c = 0; c < n; ++c) {
        out.entries(r, c) = complex_number(row[static_cast<std::size_t>(c)],
                                           at(rpath, static_cast<std::size_t>(c)));
      }
    }
  }
  if (j.contains("involution")) {
    const std::string ipath = join(path, "involution");
    require_object(j["involution"], ipath);
    for (const auto& item : j["involution"].items()) {
      if (!item.value().is_string()) throw ConfigError(join(ipath, item.key()), "expected a string");
      out.involution.emplace_back(item.key(), item.value().get<std::string>());
    }
  }
  return out;
}

GibbsKernelConfig parse_gibbs(const Json& j, const std::string& path) {
  reject_unknown(j, {"type", "mass", "frequency", "temperature"}, path);
  GibbsKernelConfig out;
  out.mass = number_or(j, "mass", path, out.mass);
  out.frequency = number_or(j, "frequency", path, out.frequency);
  out.temperature = number_or(j, "temperature", path, out.temperature);
  if (out.mass <= 0) throw ConfigError(join(path, "mass"), "must be positive");
  if (out.frequency <= 0) throw ConfigError(join(path, "frequency"), "must be positive");
  if (out.temperature <= 0) throw ConfigError(join(path, "temperature"), "must be positive");
  return out;
}

WavepacketComponent parse_component(const Json& j, const std::string& path,
                                    std::initializer_list<const char*> allowed) {
  require_object(j, path);
  reject_unknown(j, allowed, path);
  WavepacketComponent c;
  if (j.contains("amplitude")) c.amplitude = complex_number(j["amplitude"], join(path, "amplitude"));
  if (j.contains("center")) std::tie(c.t0, c.x0) = real_pair(j["center"], join(path, "center"));
  c.width = number_or(j, "width", path, c.width);
  if (!(c.width > 0)) throw ConfigError(join(path, "width"), "must be positive");
  if (j.contains("wavevector")) {
    std::tie(c.omega0, c.k0) = real_pair(j["wavevector"], join(path, "wavevector"));
  }
  c.envelope_rapidity = number_or(j, "envelope_rapidity", path, 0.0);
  return c;
}

FieldKernelConfig parse_field(const Json& j, const std::string& path) {
  reject_unknown(j, {"type", "mass", "hbar", "beta", "rest_frame", "packets"}, path);
  FieldKernelConfig out;
  out.spec.mass = number_or(j, "mass", path, out.spec.mass);
  out.spec.hbar = number_or(j, "hbar", path, out.spec.hbar);
  if (j.contains("beta") && !j["beta"].is_null()) {
    out.spec.beta = number(j["beta"], join(path, "beta"));
  }
  if (j.contains("rest_frame")) {
    std::tie(out.spec.rest_frame_t, out.spec.rest_frame_x) =
        real_pair(j["rest_frame"], join(path, "rest_frame"));
  }
  try {
    out.spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }

  const std::string ppath = join(path, "packets");
  if (!j.contains("packets")) throw ConfigError(ppath, "required field missing");
  if (!j["packets"].is_array()) throw ConfigError(ppath, "expected an array");
  std::set<std::string> names;
  for (std::size_t k = 0; k < j["packets"].size(); ++k) {
    const Json& p = j["packets"][k];
    const std::string path_k = at(ppath, k);
    require_object(p, path_k);
    if (!p.contains("name") || !p["name"].is_string()) {
      throw ConfigError(join(path_k, "name"), "required string field missing");
    }
    NamedPacket named;
    named.name = p["name"].get<std::string>();
    check_tag(named.name, join(path_k, "name"));
    if (named.name.find('^') != std::string::npos) {
      throw ConfigError(join(path_k, "name"), "packet names may not contain '^'");
    }
    if (!names.insert(named.name).second) throw ConfigError(join(path_k, "name"), "duplicate packet name");
    std::vector<WavepacketComponent> comps;
    if (p.contains("components")) {
      reject_unknown(p, {"name", "components"}, path_k);
      const std::string cpath = join(path_k, "components");
      if (!p["components"].is_array() || p["components"].empty()) {
        throw ConfigError(cpath, "expected a non-empty array");
      }
      for (std::size_t c = 0; c < p["components"].size(); ++c) {
        comps.push_back(parse_component(p["components"][c], at(cpath, c),
                                        {"amplitude", "center", "width", "wavevector",
                                         "envelope_rapidity"}));
      }
    } else {
      comps.push_back(parse_component(p, path_k,
                                      {"name", "amplitude", "center", "width", "wavevector",
                                       "envelope_rapidity"}));
    }
    named.packet = Wavepacket(std::move(comps));
    out.packets.push_back(std::move(named));
  }
  return out;
}

KernelConfig parse_kernel(const Json& j, const std::string& path) {
  require_object(j, path);
  const std::string tpath = join(path, "type");
  if (!j.contains("type") || !j["type"].is_string()) throw ConfigError(tpath, "required string field missing");
  const std::string type = j["type"].get<std::string>();
  if (type == "matrix") return parse_matrix(j, path);
  if (type == "gibbs-oscillator") return parse_gibbs(j, path);
  if (type == "field") return parse_field(j, path);
  throw ConfigError(tpath, "expected one of matrix, gibbs-oscillator, field");
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::verify: return "verify";
    case Mode::moments: return "moments";
    case Mode::gram: return "gram";
    case Mode::boost_scan: return "boost-scan";
    case Mode::witness: return "witness";
  }
  return "";
}

std::optional<Mode> parse_mode(const std::string& s) {
  for (Mode m : {Mode::verify, Mode::moments, Mode::gram, Mode::boost_scan, Mode::witness}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

ExperimentConfig parse_config(const nlohmann::ordered_json& doc) {
  require_object(doc, "");
  reject_unknown(doc,
                 {"mode", "kernel", "words", "rapidities", "betas", "separations", "pair",
                  "seed", "tolerance", "max_degree", "trials", "output", "record_timing"},
                 "");
  ExperimentConfig cfg = default_config();
  cfg.echo = doc;
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw ConfigError("mode", "expected a string");
    cfg.mode = parse_mode(doc["mode"].get<std::string>());
    if (!cfg.mode) throw ConfigError("mode", "expected one of verify, moments, gram, boost-scan, witness");
  }
  if (doc.contains("kernel")) cfg.kernel = parse_kernel(doc["kernel"], "kernel");
  if (doc.contains("words")) cfg.words = string_list(doc["words"], "words");
  if (doc.contains("rapidities")) cfg.rapidities = number_list(doc["rapidities"], "rapidities");
  if (doc.contains("betas")) {
    cfg.betas = number_list(doc["betas"], "betas");
    for (std::size_t k = 0; k < cfg.betas.size(); ++k) {
      if (cfg.betas[k] <= 0) throw ConfigError(at("betas", k), "must be positive");
    }
  }
  if (doc.contains("separations")) cfg.separations = number_list(doc["separations"], "separations");
  if (doc.contains("pair")) {
    cfg.pair = string_list(doc["pair"], "pair");
    if (cfg.pair.size() != 2) throw ConfigError("pair", "expected exactly two packet names");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0)) {
      throw ConfigError("seed", "expected a non-negative integer");
    }
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("tolerance")) {
    cfg.tolerance = number(doc["tolerance"], "tolerance");
    if (cfg.tolerance < 0) throw ConfigError("tolerance", "must be non-negative");
  }
  if (doc.contains("max_degree")) {
    cfg.max_degree = count(doc["max_degree"], "max_degree");
    if (cfg.max_degree > 4) throw ConfigError("max_degree", "must be at most 4");
  }
  if (doc.contains("trials")) cfg.trials = count(doc["trials"], "trials");
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw ConfigError("output", "expected a string");
    cfg.output = doc["output"].get<std::string>();
  }
  if (doc.contains("record_timing")) {
    if (!doc["record_timing"].is_boolean()) throw ConfigError("record_timing", "expected a boolean");
    cfg.record_timing = doc["record_timing"].get<bool>();
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  MatrixKernelConfig m;
  m.indices = {"1", "2", "3"};
  m.entries.resize(3, 3);
  m.entries << 1.0, 0.5, 0.2, 0.5, 1.0, 0.3, 0.2, 0.3, 1.0;
  cfg.kernel = std::move(m);
  cfg.echo = nlohmann::ordered_json::object();
  return cfg;
}

GaussianKernel build_kernel(const ExperimentConfig& config) {
  if (const auto* m = std::get_if<MatrixKernelConfig>(&config.kernel)) {
    std::map<std::string, std::string> partner;
    for (const auto& t : m->indices) partner[t] = t;
    for (const auto& [a, b] : m->involution) {
      if (!partner.count(a)) throw ConfigError("kernel.involution." + a, "unknown index");
      if (!partner.count(b)) throw ConfigError("kernel.involution." + a, "partner '" + b + "' is not an index");
      partner[a] = b;
      partner[b] = a;
    }
    std::vector<Index> indices;
    for (const auto& t : m->indices) indices.emplace_back(t, partner[t]);
    try {
      return GaussianKernel(std::move(indices), m->entries);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("kernel", e.what());
    }
  }
  if (const auto* g = std::get_if<GibbsKernelConfig>(&config.kernel)) {
    return gibbs_oscillator_kernel(g->mass, g->frequency, g->temperature);
  }
  const auto& f = std::get<FieldKernelConfig>(config.kernel);
  std::vector<Wavepacket> packets;
  std::vector<Index> indices;
  for (const auto& p : f.packets) {
    const bool real = p.packet.conjugate() == p.packet;
    indices.emplace_back(p.name, real ? p.name : p.name + "^c");
    packets.push_back(p.packet);
  }
  for (const auto& p : f.packets) {
    if (p.packet.conjugate() == p.packet) continue;
    indices.emplace_back(p.name + "^c", p.name);
    packets.push_back(p.packet.conjugate());
  }
  const auto n = static_cast<Eigen::Index>(packets.size());
  Eigen::MatrixXcd k(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      k(a, b) = field_kernel(f.spec, packets[static_cast<std::size_t>(a)],
                             packets[static_cast<std::size_t>(b)]);
      k(b, a) = std::conj(k(a, b));
    }
    k(a, a) = k(a, a).real();
  }
  return GaussianKernel(std::move(indices), std::move(k));
}

ExtendedWord parse_word(const std::string& text, const GaussianKernel& kernel,
                        const std::string& field) {
  if (text == "1") return ExtendedWord{};
  std::vector<Word> segments(1);
  std::stringstream ss(text);
  std::string token;
  std::vector<Index> factors;
  while (std::getline(ss, token, '*')) {
    if (token == "V") {
      segments.back() = Word(std::move(factors));
      factors.clear();
      segments.emplace_back();
    } else if (token.size() > 1 && token[0] == 'M') {
      const Index probe(token.substr(1));
      if (!kernel.contains(probe)) {
        throw ConfigError(field, "unknown index '" + token.substr(1) + "' in word '" + text + "'");
      }
      factors.push_back(kernel.registered(probe));
    } else {
      throw ConfigError(field, "cannot parse factor '" + token + "' in word '" + text + "'");
    }
  }
  if (text.empty() || text.back() == '*') throw ConfigError(field, "malformed word '" + text + "'");
  segments.back() = Word(std::move(factors));
  return ExtendedWord(std::move(segments));
}

}  // namespace qcmt::cli
