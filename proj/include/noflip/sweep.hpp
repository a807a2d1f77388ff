#pragma once

// Seeded parameter sweeps: config parsing (strict, unknown keys are errors),
// row generation with per-row RNG streams, CSV/JSON rendering and a manifest
// sidecar. Identical (config, seed, version) must reproduce identical bytes.

#include <cstdint>
#include <ctime>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "noflip/optimize.hpp"
#include "noflip/report.hpp"
#include "noflip/sampling.hpp"
#include "noflip/version.hpp"

namespace noflip {

struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

enum class triple_source { random, grid, list };
enum class machine_source { random, trivial, identity_gram, witness, optimize };
enum class output_format { csv, json };

struct sweep_config {
  std::uint64_t seed = 1;
  std::size_t samples = 0;
  triple_source triples = triple_source::random;
  std::vector<double> grid_a, grid_c, grid_theta;
  std::vector<flip_triple> listed;
  machine_source machine = machine_source::random;
  double tol_great_circle = 1e-9;
  double tol_feasibility = 1e-9;
  std::string out_path;
  output_format format = output_format::csv;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> known,
                           const char* where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (std::string_view k : known) ok = ok || key == k;
    if (!ok)
      throw std::invalid_argument(std::string("sweep config: unknown key '") + key + "' in " +
                                  where);
  }
}

inline const nlohmann::json& need(const nlohmann::json& j, const char* key, const char* where) {
  if (!j.contains(key))
    throw std::invalid_argument(std::string("sweep config: missing key '") + key + "' in " + where);
  return j.at(key);
}

inline std::vector<double> number_list(const nlohmann::json& j, const char* key) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(std::string("sweep config: '") + key +
                                "' must be a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number())
      throw std::invalid_argument(std::string("sweep config: '") + key +
                                  "' must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline flip_triple triple_from_item(const nlohmann::json& item) {
  if (!item.is_object())
    throw std::invalid_argument("sweep config: each triples item must be an object");
  reject_unknown(item, {"a", "b", "c", "d", "theta"}, "triples item");
  auto num = [&](const char* key) {
    const auto& v = need(item, key, "triples item");
    if (!v.is_number())
      throw std::invalid_argument(std::string("sweep config: triples item '") + key +
                                  "' must be a number");
    return v.get<double>();
  };
  double a = num("a"), c = num("c"), theta = num("theta");
  if (item.contains("b") != item.contains("d"))
    throw std::invalid_argument("sweep config: triples item must give both b and d or neither");
  if (item.contains("b")) return flip_triple(a, num("b"), c, num("d"), theta);
  return flip_triple::from_ac(a, c, theta);
}

}  // namespace detail

inline sweep_config parse_sweep_config(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("sweep config: expected a JSON object");
  detail::reject_unknown(j, {"seed", "samples", "triples", "machine", "tolerances", "output"},
                         "the top level");
  sweep_config cfg;

  const auto& seed = detail::need(j, "seed", "the top level");
  if (!seed.is_number_unsigned())
    throw std::invalid_argument("sweep config: seed must be a 64-bit unsigned integer");
  cfg.seed = seed.get<std::uint64_t>();

  const auto& samples = detail::need(j, "samples", "the top level");
  if (!samples.is_number_unsigned() || samples.get<std::uint64_t>() == 0)
    throw std::invalid_argument("sweep config: samples must be a positive integer");
  cfg.samples = samples.get<std::size_t>();

  const auto& triples = detail::need(j, "triples", "the top level");
  if (!triples.is_object()) throw std::invalid_argument("sweep config: triples must be an object");
  std::string tsource = detail::need(triples, "source", "triples").get<std::string>();
  if (tsource == "random") {
    detail::reject_unknown(triples, {"source"}, "triples");
    cfg.triples = triple_source::random;
  } else if (tsource == "grid") {
    detail::reject_unknown(triples, {"source", "a", "c", "theta"}, "triples");
    cfg.triples = triple_source::grid;
    cfg.grid_a = detail::number_list(detail::need(triples, "a", "triples"), "a");
    cfg.grid_c = detail::number_list(detail::need(triples, "c", "triples"), "c");
    cfg.grid_theta = detail::number_list(detail::need(triples, "theta", "triples"), "theta");
    std::size_t count = cfg.grid_a.size() * cfg.grid_c.size() * cfg.grid_theta.size();
    if (count != cfg.samples)
      throw std::invalid_argument("sweep config: samples must equal the grid point count " +
                                  std::to_string(count));
    for (double a : cfg.grid_a)
      for (double c : cfg.grid_c)
        for (double theta : cfg.grid_theta) flip_triple::from_ac(a, c, theta);  // validates
  } else if (tsource == "list") {
    detail::reject_unknown(triples, {"source", "items"}, "triples");
    cfg.triples = triple_source::list;
    const auto& items = detail::need(triples, "items", "triples");
    if (!items.is_array() || items.empty())
      throw std::invalid_argument("sweep config: triples items must be a non-empty array");
    for (const auto& item : items) cfg.listed.push_back(detail::triple_from_item(item));
    if (cfg.listed.size() != cfg.samples)
      throw std::invalid_argument("sweep config: samples must equal the item count " +
                                  std::to_string(cfg.listed.size()));
  } else {
    throw std::invalid_argument("sweep config: triples source must be random, grid or list");
  }

  const auto& machine = detail::need(j, "machine", "the top level");
  if (!machine.is_object()) throw std::invalid_argument("sweep config: machine must be an object");
  detail::reject_unknown(machine, {"source"}, "machine");
  std::string msource = detail::need(machine, "source", "machine").get<std::string>();
  if (msource == "random") cfg.machine = machine_source::random;
  else if (msource == "trivial") cfg.machine = machine_source::trivial;
  else if (msource == "identity-gram") cfg.machine = machine_source::identity_gram;
  else if (msource == "witness") cfg.machine = machine_source::witness;
  else if (msource == "optimize") cfg.machine = machine_source::optimize;
  else
    throw std::invalid_argument(
        "sweep config: machine source must be random, trivial, identity-gram, witness or optimize");

  if (j.contains("tolerances")) {
    const auto& tols = j.at("tolerances");
    if (!tols.is_object())
      throw std::invalid_argument("sweep config: tolerances must be an object");
    detail::reject_unknown(tols, {"great_circle", "feasibility"}, "tolerances");
    auto positive = [&](const char* key, double fallback) {
      if (!tols.contains(key)) return fallback;
      const auto& v = tols.at(key);
      if (!v.is_number() || !(v.get<double>() > 0.0))
        throw std::invalid_argument(std::string("sweep config: tolerance '") + key +
                                    "' must be a positive number");
      return v.get<double>();
    };
    cfg.tol_great_circle = positive("great_circle", cfg.tol_great_circle);
    cfg.tol_feasibility = positive("feasibility", cfg.tol_feasibility);
  }

  const auto& output = detail::need(j, "output", "the top level");
  if (!output.is_object()) throw std::invalid_argument("sweep config: output must be an object");
  detail::reject_unknown(output, {"path", "format"}, "output");
  const auto& path = detail::need(output, "path", "output");
  if (!path.is_string() || path.get<std::string>().empty())
    throw std::invalid_argument("sweep config: output path must be a non-empty string");
  cfg.out_path = path.get<std::string>();
  std::string fmt = detail::need(output, "format", "output").get<std::string>();
  if (fmt == "csv") cfg.format = output_format::csv;
  else if (fmt == "json") cfg.format = output_format::json;
  else throw std::invalid_argument("sweep config: output format must be csv or json");

  return cfg;
}

inline sweep_config parse_sweep_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("sweep config: invalid JSON: ") + e.what());
  }
  return parse_sweep_config(j);
}

// ---------------------------------------------------------------------------
// row generation

inline flip_triple sweep_triple(const sweep_config& cfg, std::size_t row, std::mt19937_64& rng) {
  switch (cfg.triples) {
    case triple_source::random: return random_triple(rng);
    case triple_source::list: return cfg.listed.at(row);
    case triple_source::grid: {
      std::size_t nt = cfg.grid_theta.size(), nc = cfg.grid_c.size();
      std::size_t ia = row / (nc * nt), ic = (row / nt) % nc, it = row % nt;
      return flip_triple::from_ac(cfg.grid_a.at(ia), cfg.grid_c.at(ic), cfg.grid_theta.at(it));
    }
  }
  throw std::logic_error("sweep_triple: bad source");
}

inline machine_model sweep_machine(const sweep_config& cfg, const flip_triple& t, std::size_t row,
                                   std::mt19937_64& rng) {
  switch (cfg.machine) {
    case machine_source::random: return random_machine(rng);
    case machine_source::trivial: return machine_model::trivial();
    case machine_source::identity_gram: return machine_model::identity_gram();
    case machine_source::witness: return machine_model::signalling_witness();
    case machine_source::optimize: {
      search_config sc;
      sc.seed = mix_seed(cfg.seed, row);
      return minimize_deviation(t, sc).argmin;
    }
  }
  throw std::logic_error("sweep_machine: bad source");
}

inline std::vector<verification_report> compute_sweep_rows(const sweep_config& cfg) {
  report_options opt;
  opt.great_circle_tol = cfg.tol_great_circle;
  opt.feasibility_tol = cfg.tol_feasibility;
  std::vector<verification_report> rows;
  rows.reserve(cfg.samples);
  for (std::size_t row = 0; row < cfg.samples; ++row) {
    std::mt19937_64 rng(mix_seed(cfg.seed, row));
    flip_triple t = sweep_triple(cfg, row, rng);
    machine_model m = sweep_machine(cfg, t, row, rng);
    rows.push_back(make_report({t, m}, opt));
  }
  return rows;
}

inline std::string render_rows_csv(const std::vector<verification_report>& rows) {
  std::string out = csv_header();
  out += '\n';
  for (const verification_report& r : rows) {
    out += csv_row(r);
    out += '\n';
  }
  return out;
}

inline std::string render_rows_json(const std::vector<verification_report>& rows) {
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const verification_report& r : rows) j["rows"].push_back(report_to_json(r));
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// manifest sidecar

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (std::size_t i = 16; i-- > 0; v >>= 4) out[i] = digits[v & 0xf];
  return out;
}

inline std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct run_manifest {
  std::string config_hash;  // fnv1a64 over the config text
  std::string version;
  std::uint64_t seed = 0;
  std::string started;
  std::string finished;
  std::size_t rows = 0;
};

inline nlohmann::ordered_json manifest_to_json(const run_manifest& m) {
  nlohmann::ordered_json j;
  j["config_hash"] = m.config_hash;
  j["version"] = m.version;
  j["seed"] = m.seed;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["rows"] = m.rows;
  return j;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw io_error("write to '" + path + "' failed");
}

// Runs the sweep, writes the data file and '<out>.manifest.json', returns the
// manifest. Data bytes depend only on (config, seed, version), never on time.
inline run_manifest run_sweep(const sweep_config& cfg, const std::string& config_text) {
  run_manifest m;
  m.config_hash = hex64(fnv1a64(config_text));
  m.version = artifact_version;
  m.seed = cfg.seed;
  m.started = utc_timestamp();
  std::vector<verification_report> rows = compute_sweep_rows(cfg);
  std::string data = cfg.format == output_format::csv ? render_rows_csv(rows)
                                                      : render_rows_json(rows);
  write_file(cfg.out_path, data);
  m.finished = utc_timestamp();
  m.rows = rows.size();
  write_file(cfg.out_path + ".manifest.json", manifest_to_json(m).dump(2) + "\n");
  return m;
}

}  // namespace noflip
