#include <gtest/gtest.h>

#include <qcmt/cli.hpp>

using namespace qcmt;
using namespace qcmt::cli;
using Json = nlohmann::ordered_json;

namespace {

std::string config_error_field(const Json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

Json two_by_two() {
  return Json::parse(R"({"type": "matrix", "indices": ["1", "2"], "entries": [[1, 0.5], [0.5, 1]]})");
}

Json field_kernel_json(const char* beta = "null") {
  return Json::parse(std::string(R"({"type": "field", "mass": 1, "beta": )") + beta +
                     R"(, "packets": [
        {"name": "f", "center": [0, 0], "width": 1},
        {"name": "g", "center": [0.5, 1.0], "width": 1, "wavevector": [1.2, 0.4]}]})");
}

}  // namespace

TEST(ConfigTest, UnknownFieldsAreNamed) {
  EXPECT_EQ(config_error_field(Json::parse(R"({"kernal": {}})")), "kernal");
  Json doc;
  doc["kernel"] = two_by_two();
  doc["kernel"]["extra"] = 1;
  EXPECT_EQ(config_error_field(doc), "kernel.extra");
  doc = Json::object();
  doc["kernel"] = field_kernel_json();
  doc["kernel"]["packets"][1]["colour"] = "red";
  EXPECT_EQ(config_error_field(doc), "kernel.packets[1].colour");
}

TEST(ConfigTest, TypeErrorsAreNamed) {
  EXPECT_EQ(config_error_field(Json::parse(R"({"seed": -1})")), "seed");
  EXPECT_EQ(config_error_field(Json::parse(R"({"mode": "plot"})")), "mode");
  EXPECT_EQ(config_error_field(Json::parse(R"({"betas": [1, -2]})")), "betas[1]");
  EXPECT_EQ(config_error_field(Json::parse(
                R"({"kernel": {"type": "matrix", "indices": ["1"], "entries": [[1, 2]]}})")),
            "kernel.entries[0]");
  EXPECT_EQ(config_error_field(Json::parse(R"({"kernel": {"type": "lattice"}})")), "kernel.type");
  EXPECT_EQ(config_error_field(Json::parse(
                R"({"kernel": {"type": "field", "packets": [{"name": "f", "width": 0}]}})")),
            "kernel.packets[0].width");
}

TEST(ConfigTest, ComplexEntriesAndInvolution) {
  const auto cfg = parse_config(Json::parse(R"({"kernel": {
      "type": "matrix", "indices": ["a", "b"], "involution": {"a": "b"},
      "entries": [[1, [0, 0.5]], [[0, -0.5], 1]]}})"));
  const auto k = build_kernel(cfg);
  EXPECT_EQ(k.conjugate(Index("a")).tag(), "b");
  EXPECT_EQ(k.pair(Index("a"), Index("b")), Complex(0.0, 0.5));
}

TEST(ConfigTest, NonHermitianMatrixIsConfigError) {
  const auto cfg = parse_config(Json::parse(
      R"({"kernel": {"type": "matrix", "indices": ["1", "2"], "entries": [[1, 0.5], [0.4, 1]]}})"));
  EXPECT_THROW(build_kernel(cfg), ConfigError);
}

TEST(ConfigTest, FieldKernelAddsConjugates) {
  Json doc;
  doc["kernel"] = field_kernel_json();
  const auto k = build_kernel(parse_config(doc));
  ASSERT_EQ(k.size(), 3u);
  EXPECT_TRUE(k.contains(Index("g^c")));
  EXPECT_EQ(k.conjugate(Index("f")).tag(), "f");
  EXPECT_GE(k.min_eigenvalue(), -1e-10);
}

TEST(WordParseTest, FactorsAndProjector) {
  const auto k = build_kernel(default_config());
  EXPECT_EQ(parse_word("M1*V*M2", k, "w").to_string(), "M1*V*M2");
  EXPECT_EQ(parse_word("V*V", k, "w").to_string(), "V");
  EXPECT_EQ(parse_word("1", k, "w"), ExtendedWord{});
  EXPECT_THROW(parse_word("M7", k, "w"), ConfigError);
  EXPECT_THROW(parse_word("M1**M2", k, "w"), ConfigError);
  EXPECT_THROW(parse_word("M1*", k, "w"), ConfigError);
}

TEST(VerifyTest, DefaultConfigPasses) {
  const auto r = run_verify(default_config());
  EXPECT_EQ(r.exit_code, kExitPass);
  const auto report = Json::parse(r.output);
  EXPECT_TRUE(report["passed"].get<bool>());
  EXPECT_GE(report["checks"].size(), 9u);
  EXPECT_FALSE(report.contains("timing_ms"));
}

TEST(VerifyTest, NonPsdKernelFailsGramCheck) {
  const auto cfg = parse_config(Json::parse(
      R"({"kernel": {"type": "matrix", "indices": ["1", "2"], "entries": [[1, 2], [2, 1]]}})"));
  const auto r = run_verify(cfg);
  EXPECT_EQ(r.exit_code, kExitCheckFailure);
  const auto report = Json::parse(r.output);
  for (const auto& c : report["checks"]) {
    if (c["name"] == "gram_psd") EXPECT_FALSE(c["passed"].get<bool>());
  }
}

TEST(VerifyTest, EmptyIndexSetPassesWithWarning) {
  const auto cfg = parse_config(Json::parse(R"({"kernel": {"type": "matrix", "indices": []}})"));
  const auto r = run_verify(cfg);
  EXPECT_EQ(r.exit_code, kExitPass);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings.front().find("empty index set"), std::string::npos);
}

TEST(VerifyTest, DeterministicAndSeedSensitive) {
  auto cfg = default_config();
  EXPECT_EQ(run_verify(cfg).output, run_verify(cfg).output);
  auto other = cfg;
  other.seed = 17;
  EXPECT_NE(run_verify(cfg).output, run_verify(other).output);
}

TEST(VerifyTest, TimingOnlyWhenRequested) {
  auto cfg = default_config();
  cfg.record_timing = true;
  EXPECT_TRUE(Json::parse(run_verify(cfg).output).contains("timing_ms"));
}

TEST(VerifyTest, FieldConfigRunsFieldChecks) {
  Json doc;
  doc["kernel"] = field_kernel_json();
  doc["trials"] = 20;
  const auto r = run_verify(parse_config(doc));
  EXPECT_EQ(r.exit_code, kExitPass);
  bool saw_microcausality = false;
  const auto report = Json::parse(r.output);
  for (const auto& c : report["checks"]) {
    saw_microcausality = saw_microcausality || c["name"] == "microcausality";
  }
  EXPECT_TRUE(saw_microcausality);
}

TEST(MomentsTest, KnownRows) {
  Json doc;
  doc["kernel"] = two_by_two();
  doc["words"] = {"M1*M2", "M1", "M1*M2*M1*M2", "M1*V*M2", "V*M1*M2*V"};
  const auto r = run_moments(parse_config(doc));
  EXPECT_EQ(r.exit_code, kExitPass);
  EXPECT_EQ(r.output,
            "word,re,im\n"
            "M1*M2,0.5,0\n"
            "M1,0,0\n"
            "M1*M2*M1*M2,1.5,0\n"
            "M1*V*M2,0,0\n"
            "V*M1*M2*V,0.5,0\n");
}

TEST(MomentsTest, OverCapRowIsMarked) {
  Json doc;
  doc["kernel"] = two_by_two();
  std::string long_word = "M1";
  for (int k = 0; k < 13; ++k) long_word += "*M1";
  doc["words"] = {long_word, "M1*M1"};
  const auto r = run_moments(parse_config(doc));
  EXPECT_EQ(r.exit_code, kExitNumericalFailure);
  EXPECT_NE(r.output.find(long_word + ",error,error\n"), std::string::npos);
  EXPECT_NE(r.output.find("M1*M1,1,0\n"), std::string::npos);
}

TEST(MomentsTest, MissingWordsIsConfigError) {
  EXPECT_THROW(run_moments(default_config()), ConfigError);
}

TEST(GramModeTest, ReportsSpectrum) {
  Json doc;
  doc["kernel"] = two_by_two();
  doc["max_degree"] = 1;
  const auto r = run_gram(parse_config(doc));
  EXPECT_EQ(r.exit_code, kExitPass);
  const auto j = Json::parse(r.output);
  EXPECT_EQ(j["dimension"], 3);
  EXPECT_EQ(j["basis"][1], "M1");
  EXPECT_NEAR(j["eigenvalues"][0].get<double>(), 0.5, 1e-12);
}

TEST(BoostScanTest, RowsAndContract) {
  Json doc;
  doc["kernel"] = field_kernel_json("1");
  doc["rapidities"] = {0.0, 0.5};
  const auto r = run_boost_scan(parse_config(doc));
  EXPECT_EQ(r.exit_code, kExitPass);
  std::istringstream in(r.output);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "rapidity,vacuum_deviation,thermal_deviation");
  std::getline(in, line);
  EXPECT_EQ(line, "0,0,0");
  std::getline(in, line);
  double chi = 0, dv = 0, dt = 0;
  char c1 = 0, c2 = 0;
  std::istringstream row(line);
  row >> chi >> c1 >> dv >> c2 >> dt;
  EXPECT_EQ(chi, 0.5);
  EXPECT_LE(dv, 1e-6);
  EXPECT_GT(dt, 1e-3);
}

TEST(BoostScanTest, RequiresFieldKernelAndBeta) {
  EXPECT_THROW(run_boost_scan(default_config()), ConfigError);
  Json doc;
  doc["kernel"] = field_kernel_json();
  doc["rapidities"] = {0.5};
  EXPECT_THROW(run_boost_scan(parse_config(doc)), ConfigError);
  doc["betas"] = {1.0};
  EXPECT_EQ(run_boost_scan(parse_config(doc)).exit_code, kExitPass);
}

TEST(WitnessModeTest, Rows) {
  Json doc;
  doc["kernel"] = two_by_two();
  const auto r = run_witness(parse_config(doc));
  EXPECT_NE(r.output.find("1,2,0,0,0.5,0,0.5\n"), std::string::npos);
}
