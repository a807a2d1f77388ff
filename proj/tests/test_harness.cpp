#include <catch2/catch_amalgamated.hpp>

#include <noflip/report.hpp>
#include <noflip/sampling.hpp>
#include <noflip/sweep.hpp>

#include "oracles.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

using namespace noflip;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

struct temp_dir {
  std::filesystem::path path;
  temp_dir() {
    path = std::filesystem::temp_directory_path() /
           ("noflip_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~temp_dir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string basic_config(const std::string& out_path, const std::string& fmt = "csv",
                         int samples = 4) {
  nlohmann::ordered_json j;
  j["seed"] = 42;
  j["samples"] = samples;
  j["triples"] = {{"source", "random"}};
  j["machine"] = {{"source", "random"}};
  j["output"] = {{"path", out_path}, {"format", fmt}};
  return j.dump();
}

}  // namespace

TEST_CASE("format_double survives a parse round trip") {
  std::mt19937_64 rng(401);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    double v = u(rng) * std::pow(10.0, rep % 17 - 8);
    REQUIRE(std::stod(format_double(v)) == v);
  }
  REQUIRE(format_double(0.75) == "0.75");
  REQUIRE(format_double(0.0) == "0");
  REQUIRE(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("csv schema is pinned") {
  REQUIRE(csv_header() ==
          "triple_a,triple_b,triple_c,triple_d,theta,mu,nu,deviation,lambda_i,"
          "lambda_f,entropy_i,entropy_f,gain,n_value,great_circle,feasible");

  verification_report r;
  r.triple_a = 0.5;
  r.great_circle = true;
  std::string row = csv_row(r);
  REQUIRE(row.substr(0, 4) == "0.5,");
  REQUIRE(row.find(",nan,") != std::string::npos);  // default n_value
  REQUIRE(row.substr(row.size() - 10) == "true,false");
  // 16 fields means 15 commas
  REQUIRE(std::count(row.begin(), row.end(), ',') == 15);
}

TEST_CASE("report json round-trips bit-exactly") {
  std::mt19937_64 rng(409);
  for (int rep = 0; rep < 20; ++rep) {
    flip_scenario sc{random_triple(rng), random_machine(rng)};
    verification_report r = make_report(sc);
    verification_report back = report_from_json(report_to_json(r));
    REQUIRE(csv_row(back) == csv_row(r));
  }
}

TEST_CASE("report json is strict about shape") {
  flip_scenario sc{oracle::reference_triple(), machine_model::trivial()};
  nlohmann::json good = report_to_json(make_report(sc));

  nlohmann::json extra = good;
  extra["surprise"] = 1;
  REQUIRE_THROWS_WITH(report_from_json(extra),
                      Catch::Matchers::ContainsSubstring("unknown key"));

  nlohmann::json missing = good;
  missing.erase("gain");
  REQUIRE_THROWS_WITH(report_from_json(missing),
                      Catch::Matchers::ContainsSubstring("missing key"));

  nlohmann::json wrong = good;
  wrong["deviation"] = "zero";
  REQUIRE_THROWS_AS(report_from_json(wrong), std::invalid_argument);

  nlohmann::json flag = good;
  flag["feasible"] = 1;
  REQUIRE_THROWS_AS(report_from_json(flag), std::invalid_argument);

  // null n_value decodes to NaN
  nlohmann::json nulln = good;
  nulln["n_value"] = nullptr;
  REQUIRE(std::isnan(report_from_json(nulln).n_value));
}

TEST_CASE("machine json round-trips") {
  std::mt19937_64 rng(419);
  for (int rep = 0; rep < 20; ++rep) {
    machine_model m = random_machine(rng);
    machine_model back = machine_from_json(machine_to_json(m));
    REQUIRE(back.mu == m.mu);
    REQUIRE(back.nu == m.nu);
    REQUIRE(back.gram.max_abs_diff(m.gram) < 1e-12);
    REQUIRE(std::abs(back.x() - m.x()) < 1e-12);
    REQUIRE(std::abs(back.m_phi_m_psi() - m.m_phi_m_psi()) < 1e-12);
  }

  nlohmann::json j = machine_to_json(machine_model::trivial());
  j["extra"] = true;
  REQUIRE_THROWS_WITH(machine_from_json(j),
                      Catch::Matchers::ContainsSubstring("unknown key"));

  nlohmann::json short_gram = machine_to_json(machine_model::trivial());
  short_gram["gram"].erase(8);
  REQUIRE_THROWS_AS(machine_from_json(short_gram), std::invalid_argument);

  nlohmann::json bad_pair = machine_to_json(machine_model::trivial());
  bad_pair["gram"][0] = {1.0};
  REQUIRE_THROWS_AS(machine_from_json(bad_pair), std::invalid_argument);

  REQUIRE_THROWS_AS(machine_from_json(nlohmann::json::array()), std::invalid_argument);
}

TEST_CASE("make_report fills the derived flags") {
  double rr = std::sqrt(0.5);
  verification_report gc =
      make_report({flip_triple(rr, rr, rr, rr, std::acos(-1.0)),
                   machine_model::signalling_witness()});
  REQUIRE(gc.great_circle);
  REQUIRE(gc.feasible);
  REQUIRE(gc.deviation < 1e-9);
  REQUIRE(gc.n_value == Catch::Approx(1.0).margin(1e-9));

  verification_report off =
      make_report({oracle::reference_triple(), machine_model::trivial()});
  REQUIRE_FALSE(off.great_circle);
  REQUIRE_FALSE(off.feasible);
  REQUIRE(off.n_value == Catch::Approx(3.0).margin(1e-9));
}

TEST_CASE("mix_seed separates rows and seeds") {
  REQUIRE(mix_seed(1, 0) != mix_seed(1, 1));
  REQUIRE(mix_seed(1, 0) != mix_seed(2, 0));
  REQUIRE(mix_seed(1, 0) == mix_seed(1, 0));
  // a zero seed must not collapse the stream
  REQUIRE(mix_seed(0, 0) != mix_seed(0, 1));
}

TEST_CASE("fnv1a64 and hex64 are stable") {
  REQUIRE(fnv1a64("") == 14695981039346656037ULL);
  REQUIRE(fnv1a64("a") == 12638187200555641996ULL);
  REQUIRE(hex64(0) == "0000000000000000");
  REQUIRE(hex64(0xdeadbeefULL) == "00000000deadbeef");
  REQUIRE(fnv1a64("abc") != fnv1a64("acb"));
}

TEST_CASE("sweep config parsing accepts the documented shapes") {
  sweep_config random_cfg = parse_sweep_config_text(basic_config("/tmp/x.csv"));
  REQUIRE(random_cfg.seed == 42);
  REQUIRE(random_cfg.samples == 4);
  REQUIRE(random_cfg.triples == triple_source::random);
  REQUIRE(random_cfg.machine == machine_source::random);
  REQUIRE(random_cfg.format == output_format::csv);
  REQUIRE(random_cfg.tol_great_circle == 1e-9);

  nlohmann::json grid = nlohmann::json::parse(basic_config("/tmp/x.json", "json", 4));
  grid["triples"] = {{"source", "grid"},
                     {"a", {0.6, 0.8}},
                     {"c", {0.7}},
                     {"theta", {0.0, 1.5}}};
  grid["machine"] = {{"source", "witness"}};
  grid["tolerances"] = {{"great_circle", 1e-8}};
  sweep_config gcfg = parse_sweep_config(grid);
  REQUIRE(gcfg.triples == triple_source::grid);
  REQUIRE(gcfg.machine == machine_source::witness);
  REQUIRE(gcfg.tol_great_circle == 1e-8);
  REQUIRE(gcfg.tol_feasibility == 1e-9);
  REQUIRE(gcfg.format == output_format::json);

  nlohmann::json list = nlohmann::json::parse(basic_config("/tmp/x.csv", "csv", 2));
  list["triples"] = {{"source", "list"},
                     {"items",
                      {{{"a", 0.6}, {"c", 0.8}, {"theta", 1.0}},
                       {{"a", 0.6}, {"b", 0.8}, {"c", 0.8}, {"d", 0.6}, {"theta", 2.0}}}}};
  list["machine"] = {{"source", "identity-gram"}};
  sweep_config lcfg = parse_sweep_config(list);
  REQUIRE(lcfg.listed.size() == 2);
  REQUIRE(lcfg.listed[1].b == Catch::Approx(0.8));
  REQUIRE(lcfg.machine == machine_source::identity_gram);
}

TEST_CASE("sweep config rejects malformed input at every level") {
  auto base = [] { return nlohmann::json::parse(basic_config("/tmp/x.csv")); };

  nlohmann::json top = base();
  top["unknown"] = 1;
  REQUIRE_THROWS_WITH(parse_sweep_config(top),
                      Catch::Matchers::ContainsSubstring("unknown key"));

  nlohmann::json neg_seed = base();
  neg_seed["seed"] = -1;
  REQUIRE_THROWS_AS(parse_sweep_config(neg_seed), std::invalid_argument);

  nlohmann::json zero_samples = base();
  zero_samples["samples"] = 0;
  REQUIRE_THROWS_AS(parse_sweep_config(zero_samples), std::invalid_argument);

  nlohmann::json bad_triples = base();
  bad_triples["triples"] = {{"source", "random"}, {"a", {0.5}}};
  REQUIRE_THROWS_WITH(parse_sweep_config(bad_triples),
                      Catch::Matchers::ContainsSubstring("in triples"));

  nlohmann::json bad_grid = base();
  bad_grid["triples"] = {{"source", "grid"}, {"a", {0.6}}, {"c", {0.7}}, {"theta", {1.0}}};
  // samples (4) disagrees with the 1x1x1 grid
  REQUIRE_THROWS_WITH(parse_sweep_config(bad_grid),
                      Catch::Matchers::ContainsSubstring("grid point count"));

  nlohmann::json bad_point = base();
  bad_point["samples"] = 1u;
  bad_point["triples"] = {{"source", "grid"}, {"a", {1.4}}, {"c", {0.7}}, {"theta", {1.0}}};
  REQUIRE_THROWS_AS(parse_sweep_config(bad_point), std::invalid_argument);

  nlohmann::json half_item = base();
  half_item["samples"] = 1u;
  half_item["triples"] = {{"source", "list"},
                          {"items", {{{"a", 0.6}, {"b", 0.8}, {"c", 0.8}, {"theta", 1.0}}}}};
  REQUIRE_THROWS_WITH(parse_sweep_config(half_item),
                      Catch::Matchers::ContainsSubstring("both b and d"));

  nlohmann::json bad_machine = base();
  bad_machine["machine"] = {{"source", "psychic"}};
  REQUIRE_THROWS_AS(parse_sweep_config(bad_machine), std::invalid_argument);

  nlohmann::json machine_extra = base();
  machine_extra["machine"] = {{"source", "random"}, {"gram", 1}};
  REQUIRE_THROWS_WITH(parse_sweep_config(machine_extra),
                      Catch::Matchers::ContainsSubstring("in machine"));

  nlohmann::json bad_tol = base();
  bad_tol["tolerances"] = {{"great_circle", 0.0}};
  REQUIRE_THROWS_AS(parse_sweep_config(bad_tol), std::invalid_argument);

  nlohmann::json tol_extra = base();
  tol_extra["tolerances"] = {{"slack", 1e-9}};
  REQUIRE_THROWS_WITH(parse_sweep_config(tol_extra),
                      Catch::Matchers::ContainsSubstring("in tolerances"));

  nlohmann::json bad_fmt = base();
  bad_fmt["output"] = {{"path", "/tmp/x"}, {"format", "xml"}};
  REQUIRE_THROWS_AS(parse_sweep_config(bad_fmt), std::invalid_argument);

  nlohmann::json empty_path = base();
  empty_path["output"] = {{"path", ""}, {"format", "csv"}};
  REQUIRE_THROWS_AS(parse_sweep_config(empty_path), std::invalid_argument);

  REQUIRE_THROWS_WITH(parse_sweep_config_text("{not json"),
                      Catch::Matchers::ContainsSubstring("invalid JSON"));
  REQUIRE_THROWS_AS(parse_sweep_config_text("[1,2]"), std::invalid_argument);
}

TEST_CASE("grid rows enumerate a-major, theta-minor") {
  nlohmann::json grid = nlohmann::json::parse(basic_config("/tmp/x.csv", "csv", 8));
  grid["triples"] = {{"source", "grid"},
                     {"a", {0.6, 0.9}},
                     {"c", {0.5, 0.7}},
                     {"theta", {0.25, 1.25}}};
  grid["machine"] = {{"source", "trivial"}};
  sweep_config cfg = parse_sweep_config(grid);
  std::vector<verification_report> rows = compute_sweep_rows(cfg);
  REQUIRE(rows.size() == 8);

  std::size_t r = 0;
  for (double a : {0.6, 0.9})
    for (double c : {0.5, 0.7})
      for (double th : {0.25, 1.25}) {
        REQUIRE(rows[r].triple_a == Catch::Approx(a).margin(1e-15));
        REQUIRE(rows[r].triple_c == Catch::Approx(c).margin(1e-15));
        REQUIRE(rows[r].theta == Catch::Approx(th).margin(1e-15));
        REQUIRE(rows[r].mu == 0.0);
        ++r;
      }
}

TEST_CASE("sweep rows are deterministic in the seed") {
  sweep_config cfg = parse_sweep_config_text(basic_config("/tmp/x.csv", "csv", 6));
  std::string first = render_rows_csv(compute_sweep_rows(cfg));
  std::string second = render_rows_csv(compute_sweep_rows(cfg));
  REQUIRE(first == second);

  sweep_config other = cfg;
  other.seed = 43;
  REQUIRE(render_rows_csv(compute_sweep_rows(other)) != first);

  // row content does not depend on how many rows come before it
  sweep_config shorter = cfg;
  shorter.samples = 3;
  std::string head = render_rows_csv(compute_sweep_rows(shorter));
  REQUIRE(first.substr(0, head.size()) == head);
}

TEST_CASE("optimize machine source honors the per-row seed") {
  nlohmann::json j = nlohmann::json::parse(basic_config("/tmp/x.csv", "csv", 1));
  j["triples"] = {{"source", "list"},
                  {"items", {{{"a", 0.7071067811865476}, {"c", 0.7071067811865476},
                              {"theta", 3.141592653589793}}}}};
  j["machine"] = {{"source", "optimize"}};
  sweep_config cfg = parse_sweep_config(j);
  std::vector<verification_report> rows = compute_sweep_rows(cfg);
  REQUIRE(rows.size() == 1);
  // exact flipping is possible on this great circle and the search finds it
  REQUIRE(rows[0].deviation < 1e-6);
  REQUIRE(rows[0].feasible);
}

TEST_CASE("run_sweep writes data plus manifest") {
  temp_dir tmp;
  std::string out = tmp.file("rows.csv");
  std::string text = basic_config(out, "csv", 5);
  sweep_config cfg = parse_sweep_config_text(text);

  run_manifest man = run_sweep(cfg, text);
  REQUIRE(man.rows == 5);
  REQUIRE(man.seed == 42);
  REQUIRE(man.version == artifact_version);
  REQUIRE(man.config_hash == hex64(fnv1a64(text)));
  REQUIRE(man.started.size() == 20);  // ISO-8601 Z form
  REQUIRE(man.started.back() == 'Z');

  std::string data = slurp(out);
  REQUIRE(data.substr(0, csv_header().size()) == csv_header());
  REQUIRE(std::count(data.begin(), data.end(), '\n') == 6);
  REQUIRE(data.back() == '\n');

  nlohmann::json man_json = nlohmann::json::parse(slurp(out + ".manifest.json"));
  REQUIRE(man_json["config_hash"] == man.config_hash);
  REQUIRE(man_json["rows"] == 5);

  // byte-identical on rerun
  run_sweep(cfg, text);
  REQUIRE(slurp(out) == data);

  // json format renders a rows array
  std::string jout = tmp.file("rows.json");
  std::string jtext = basic_config(jout, "json", 3);
  run_sweep(parse_sweep_config_text(jtext), jtext);
  nlohmann::json rows = nlohmann::json::parse(slurp(jout));
  REQUIRE(rows["rows"].is_array());
  REQUIRE(rows["rows"].size() == 3);
  verification_report round = report_from_json(rows["rows"][0]);
  (void)round;
}

TEST_CASE("run_sweep surfaces io failures") {
  std::string text = basic_config("/nonexistent_dir_noflip/rows.csv", "csv", 1);
  sweep_config cfg = parse_sweep_config_text(text);
  REQUIRE_THROWS_AS(run_sweep(cfg, text), io_error);
}
