#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "medsec/scenario.hpp"

using namespace medsec;
namespace fs = std::filesystem;

namespace {

std::string config_key(std::string_view json) {
  try {
    parse_config(json);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "accepted";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fixture(std::string_view name) { return fs::path(MEDSEC_FIXTURE_DIR) / (std::string(name) + ".json"); }

fs::path scratch(std::string_view name) {
  const fs::path p = fs::temp_directory_path() / ("medsec_scenario_test_" + std::string(name));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Topology, StandardAddresses) {
  const Topology t = Topology::standard();
  EXPECT_EQ(t.require(Role::Device).ip.to_string(), "192.168.1.50");
  EXPECT_EQ(t.require(Role::Server).ip.to_string(), "192.168.1.100");
  EXPECT_EQ(t.require(Role::Attacker).mac.to_string(), "02:00:00:00:00:42");
  EXPECT_EQ(t.require(Role::Gateway).ip.to_string(), "192.168.1.1");
  EXPECT_TRUE(t.has_ip(IpAddr4::parse("192.168.1.66")));
  EXPECT_FALSE(t.has_ip(IpAddr4::parse("192.168.1.67")));
}

TEST(Config, MinimalDefaults) {
  const ScenarioConfig c = parse_config(R"({"seed": 5})");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.messages, 10u);
  EXPECT_EQ(c.device.mode, Mode::Plain);
  EXPECT_FALSE(c.attack);
  EXPECT_FALSE(c.models);
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_EQ(config_key("{"), "");
  EXPECT_EQ(config_key(R"({"name": "x"})"), "seed");
  EXPECT_EQ(config_key(R"({"seed": 1, "colour": 2})"), "colour");
  EXPECT_EQ(config_key(R"({"seed": -1})"), "seed");
  EXPECT_EQ(config_key(R"({"seed": 1, "preset": "fast"})"), "preset");
  EXPECT_EQ(config_key(R"({"seed": 1, "device": {"mode": "rot13"}})"), "device.mode");
  EXPECT_EQ(config_key(R"({"seed": 1, "device": {"key": "00"}})"), "device.key");
  EXPECT_EQ(config_key(R"({"seed": 1, "device": {"mode": "encrypted"}})"), "device.key");
  EXPECT_EQ(config_key(R"({"seed": 1, "device": {"script": [{"heart_rate": 1}]}})"), "device.script[0].temperature");
  EXPECT_EQ(config_key(R"({"seed": 1, "apply_loss": true})"), "apply_loss");
  EXPECT_EQ(config_key(R"({"seed": 1, "topology": {"nodes": [{"role": "device", "mac": "zz", "ip": "1.2.3.4"}]}})"),
            "topology.nodes[0].mac");
  EXPECT_EQ(config_key(R"({"seed": 1, "attack": {"phases": ["recon", "hack"]}})").rfind("attack.phases", 0), 0u);
  EXPECT_EQ(config_key(R"({"seed": 1, "attack": {"phases": ["recon"], "victim": "10.0.0.9"}})"), "attack.victim");
  EXPECT_EQ(config_key(R"({"seed": 1, "attack": {"phases": ["active"]}})"), "attack");
  EXPECT_EQ(config_key(R"({"seed": 1, "attack": {"phases": ["recon", "poison", "active"],
                         "rules": [{"target": "plain_field", "action": "explode"}]}})"),
            "attack.rules[0].action");
  EXPECT_EQ(config_key(R"({"seed": 1, "models": {"loss": {}}})"), "models");
}

TEST(Config, DuplicateTopologyEntriesRejected) {
  EXPECT_EQ(config_key(R"({"seed": 1, "topology": {"nodes": [
      {"role": "device", "mac": "02:00:00:00:00:01", "ip": "10.0.0.1"},
      {"role": "server", "mac": "02:00:00:00:00:01", "ip": "10.0.0.2"}]}})"),
            "topology.nodes[1].mac");
  EXPECT_EQ(config_key(R"({"seed": 1, "topology": {"nodes": [
      {"role": "device", "mac": "02:00:00:00:00:01", "ip": "10.0.0.1"}]}})"),
            "topology.nodes");
}

TEST(Config, ServerMirrorsDeviceCrypto) {
  const ScenarioConfig c = parse_config(
      R"({"seed": 1, "device": {"mode": "encrypted", "key": "2b7e151628aed2a6abf7158809cf4f3c", "encoding": "base64"}})");
  EXPECT_EQ(c.server.mode, Mode::Encrypted);
  EXPECT_EQ(c.server.key, c.device.key);
  EXPECT_EQ(c.server.encoding, crypto::TextEncoding::Base64);
}

TEST(Config, ModelOverridesRenameThePreset) {
  const ScenarioConfig same = parse_config(R"({"seed": 1, "preset": "paper"})");
  EXPECT_EQ(same.models->name, "paper");
  const ScenarioConfig changed = parse_config(R"({"seed": 1, "preset": "paper", "models": {"loss": {
      "plain": {"drop_probability": 0, "retry_timeout_ms": 10},
      "encrypted": {"drop_probability": 0, "retry_timeout_ms": 10}}}})");
  EXPECT_EQ(changed.models->name, "custom");
  EXPECT_EQ(changed.models->latency, bench::paper_preset().latency);
  EXPECT_EQ(changed.models->loss.plain.retry_timeout_ms, 10);
}

TEST(Config, BundledFixturesLoad) {
  for (const char* name : {"paper-plain-passive", "paper-plain-active", "paper-encrypted-passive",
                           "paper-encrypted-active", "paper-bench"}) {
    EXPECT_NO_THROW(load_config(fixture(name))) << name;
  }
  EXPECT_THROW(load_config(fixture("missing")), ConfigError);
}

TEST(RunId, StableHex) {
  const std::string id = make_run_id("x", 1);
  EXPECT_EQ(id.size(), 16u);
  EXPECT_EQ(id, make_run_id("x", 1));
  EXPECT_NE(id, make_run_id("x", 2));
  EXPECT_EQ(make_run_id("", 0), "081e1407b4da01c7");  // FNV-1a of ":0"
}

TEST(RunScenario, PlainWithoutAttackDeliversEverything) {
  ScenarioConfig c = parse_config(R"({"seed": 3, "messages": 12})");
  const ScenarioResult r = run_scenario(c);
  EXPECT_EQ(r.messages.size(), 12u);
  EXPECT_EQ(r.server_log.records.size(), 12u);
  EXPECT_FALSE(r.intercepts);
  EXPECT_FALSE(r.impact);
  for (const auto& rec : r.server_log.records) EXPECT_EQ(rec.via_mac, r.device_mac);
}

TEST(RunScenario, PlainActiveFixtureReproducesImpactTable) {
  const ScenarioResult r = run_scenario(load_config(fixture("paper-plain-active")));
  ASSERT_TRUE(r.impact);
  ASSERT_EQ(r.impact->rows.size(), 4u);
  const wire::VitalSigns original[] = {{72, 986}, {85, 991}, {78, 982}, {68, 978}};
  const wire::VitalSigns tampered[] = {{180, 1025}, {45, 952}, {120, 1048}, {200, 893}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(r.impact->rows[i].original, original[i]);
    EXPECT_EQ(r.impact->rows[i].tampered, tampered[i]);
    EXPECT_EQ(r.impact->rows[i].verdict, Verdict::Accepted);
    EXPECT_EQ(r.impact->rows[i].detection, Detection::None);
  }
  EXPECT_EQ(r.inventory.size(), 3u);
}

TEST(RunScenario, LossWithRetriesStillResolvesEveryMessage) {
  ScenarioConfig c = parse_config(R"({"seed": 9, "messages": 200, "preset": "paper", "apply_loss": true})");
  const ScenarioResult r = run_scenario(c);
  std::size_t retried = 0;
  for (const auto& m : r.messages) {
    EXPECT_TRUE(m.resolved());
    retried += m.attempts.size() > 1 ? 1 : 0;
  }
  EXPECT_EQ(r.transmissions, r.messages.size() + [&] {
    std::size_t extra = 0;
    for (const auto& m : r.messages) extra += m.attempts.size() - 1;
    return extra;
  }());
  EXPECT_GT(retried, 0u);
}

TEST(Run, WritesArtifactsAndSummary) {
  const fs::path out = scratch("artifacts");
  const RunSummary s = run(load_config(fixture("paper-plain-active")), out);
  EXPECT_EQ(s.sent, 4u);
  EXPECT_EQ(s.received, 4u);
  EXPECT_EQ(s.tampered, 4u);
  EXPECT_EQ(s.accepted, 4u);
  for (const char* f : {"capture.jsonl", "server_log.jsonl", "impact.md", "impact.json", "summary.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  EXPECT_EQ(slurp(out / "summary.json"), s.to_json());
  EXPECT_NE(slurp(out / "impact.md").find("| 72 | 180 | 98.6 | 102.5 |"), std::string::npos);
}

TEST(Run, EncryptedActiveRejectsEveryTamper) {
  const fs::path out = scratch("enc_active");
  const RunSummary s = run(load_config(fixture("paper-encrypted-active")), out);
  EXPECT_EQ(s.tampered, 20u);
  EXPECT_EQ(s.readable, 0u);
  std::size_t rejected = 0;
  for (const auto& [kind, n] : s.rejected) {
    EXPECT_TRUE(kind == "PaddingError" || kind == "ParseError") << kind;
    rejected += n;
  }
  EXPECT_EQ(rejected, 20u);
}

TEST(Bench, RequiresMessagesAndModels) {
  EXPECT_THROW(run_bench(parse_config(R"({"seed": 1, "preset": "paper"})"), 0), ConfigError);
  try {
    run_bench(parse_config(R"({"seed": 1})"), 10);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "preset");
  }
}

TEST(Bench, PairedRunsShareSeedAndAreDeterministic) {
  const ScenarioConfig c = parse_config(R"({"seed": 77, "preset": "paper"})");
  const bench::BenchReport a = run_bench(c, 120);
  const bench::BenchReport b = run_bench(c, 120);
  EXPECT_EQ(a.samples, b.samples);
  ASSERT_TRUE(a.plain && a.encrypted);
  EXPECT_EQ(a.plain->messages, 120u);
  EXPECT_EQ(a.encrypted->messages, 120u);
  EXPECT_GT(a.encrypted->latency->mean, a.plain->latency->mean);
  for (const auto& s : a.samples) {
    if (s.dropped && s.latency_ms) {
      ASSERT_TRUE(s.recovery_ms);
      EXPECT_GT(*s.latency_ms, *s.recovery_ms);
    }
  }
}

TEST(Bench, ReportRerendersFromSamples) {
  const fs::path out = scratch("bench");
  const ScenarioConfig c = parse_config(R"({"seed": 4, "preset": "paper"})");
  write_bench(c, 80, out);
  EXPECT_EQ(rerender_report(c, out / "samples.jsonl", bench::ReportFormat::Markdown), slurp(out / "report.md"));
  EXPECT_EQ(rerender_report(c, out / "samples.jsonl", bench::ReportFormat::Csv), slurp(out / "report.csv"));
  EXPECT_THROW(rerender_report(c, out / "nope.jsonl", bench::ReportFormat::Csv), ConfigError);
}
