#include <gtest/gtest.h>

#include "medsec/attacker.hpp"

using namespace medsec;

namespace {

const MacAddr kGwMac = MacAddr::parse("02:00:00:00:00:01");
const MacAddr kDevMac = MacAddr::parse("02:00:00:00:00:32");
const MacAddr kAtkMac = MacAddr::parse("02:00:00:00:00:42");
const MacAddr kSrvMac = MacAddr::parse("02:00:00:00:00:64");
const IpAddr4 kGwIp = IpAddr4::parse("192.168.1.1");
const IpAddr4 kDevIp = IpAddr4::parse("192.168.1.50");
const IpAddr4 kAtkIp = IpAddr4::parse("192.168.1.66");
const IpAddr4 kSrvIp = IpAddr4::parse("192.168.1.100");
const crypto::Key128 kKey = crypto::Key128::from_hex("2b7e151628aed2a6abf7158809cf4f3c");

AttackPlan plan(std::vector<Phase> phases, std::vector<TamperRule> rules = {}) {
  AttackPlan p;
  p.victim_ip = kDevIp;
  p.peer_ip = kSrvIp;
  p.phases = std::move(phases);
  p.rules = std::move(rules);
  return p;
}

TamperRule plain_rule(std::size_t message, std::string hr, std::string temp) {
  TamperRule r;
  r.fields = {{"HeartRate", std::move(hr)}, {"Temperature", std::move(temp)}};
  r.message = message;
  return r;
}

struct Lab {
  Medium medium;
  Host gateway{"gateway", kGwMac, kGwIp};
  Device device;
  Server server;
  Attacker attacker;

  Lab(AttackPlan p, DeviceConfig d = {}, ServerConfig s = {})
      : device("device", kDevMac, kDevIp, std::move(d), kSrvIp, make_stream(1, RngStream::Sensor),
               make_stream(1, RngStream::Iv)),
        server("server", kSrvMac, kSrvIp, std::move(s)),
        attacker("attacker", kAtkMac, kAtkIp, std::move(p), make_stream(1, RngStream::Attacker)) {
    medium.attach(gateway);
    medium.attach(device);
    medium.attach(server);
    medium.attach(attacker);
    attacker.set_run_id("run");
    server.set_run_id("run");
  }

  void run(std::size_t messages) {
    attacker.execute(0);
    device.start(2000, messages, [this] { attacker.finish(); });
    medium.run();
  }
};

DeviceConfig encrypted_device() {
  DeviceConfig d;
  d.mode = Mode::Encrypted;
  d.key = kKey;
  return d;
}

ServerConfig encrypted_server() {
  ServerConfig s;
  s.mode = Mode::Encrypted;
  s.key = kKey;
  return s;
}

const std::vector<Phase> kPassive = {Phase::Recon, Phase::Poison, Phase::Passive, Phase::Assess};
const std::vector<Phase> kActive = {Phase::Recon, Phase::Poison, Phase::Passive, Phase::Active, Phase::Assess};

}  // namespace

TEST(Phase, NamesRoundTrip) {
  for (Phase p : {Phase::Recon, Phase::Poison, Phase::Passive, Phase::Active, Phase::Assess}) {
    EXPECT_EQ(parse_phase(to_string(p)), p);
  }
  EXPECT_THROW(parse_phase("exfiltrate"), PlanError);
}

TEST(AttackPlan, PhaseDependencies) {
  EXPECT_THROW(plan({Phase::Recon, Phase::Active}).validate(), PlanError);
  EXPECT_THROW(plan({Phase::Poison, Phase::Passive}).validate(), PlanError);
  EXPECT_THROW(plan({Phase::Recon, Phase::Poison, Phase::Assess}).validate(), PlanError);
  EXPECT_NO_THROW(plan(kActive).validate());
  AttackPlan bad = plan(kPassive);
  bad.repoison_interval_ms = 0;
  EXPECT_THROW(bad.validate(), PlanError);
}

TEST(AttackPlan, DefaultScanRangeIsVictimSlash24) {
  const auto [first, last] = plan(kPassive).effective_scan_range();
  EXPECT_EQ(first.to_string(), "192.168.1.1");
  EXPECT_EQ(last.to_string(), "192.168.1.254");
}

TEST(TamperRule, ValidationAndDescription) {
  EXPECT_EQ(plain_rule(0, "180", "102.5").describe(), "set HeartRate=180,Temperature=102.5");
  TamperRule empty;
  EXPECT_THROW(empty.validate(), PlanError);
  TamperRule iv;
  iv.target = TamperRule::Target::IvBit;
  iv.action = TamperRule::Action::FlipBit;
  EXPECT_THROW(iv.validate(), PlanError);
  iv.index = 3;
  EXPECT_NO_THROW(iv.validate());
  EXPECT_TRUE(iv.beyond_paper());
  TamperRule set_ct;
  set_ct.target = TamperRule::Target::CiphertextByte;
  set_ct.action = TamperRule::Action::SetValue;
  EXPECT_THROW(set_ct.validate(), PlanError);
}

TEST(Attacker, ReconFindsEveryLiveHost) {
  Lab lab(plan({Phase::Recon}));
  bool called = false;
  lab.attacker.recon(IpAddr4::parse("192.168.1.1"), IpAddr4::parse("192.168.1.254"), [&](const Inventory& inv) {
    called = true;
    EXPECT_EQ(inv.size(), 3u);
  });
  lab.medium.run();
  ASSERT_TRUE(called);
  const Inventory& inv = lab.attacker.inventory();
  EXPECT_EQ(inv.at(kGwIp), kGwMac);
  EXPECT_EQ(inv.at(kDevIp), kDevMac);
  EXPECT_EQ(inv.at(kSrvIp), kSrvMac);
  EXPECT_FALSE(inv.contains(kAtkIp));
}

TEST(Attacker, PoisonRequiresInventory) {
  Lab lab(plan({Phase::Recon}));
  EXPECT_THROW(lab.attacker.poison(kDevIp, kSrvIp), PlanError);
}

TEST(Attacker, PoisonRedirectsBothCachesAndRefreshes) {
  Lab lab(plan({Phase::Recon, Phase::Poison}));
  lab.attacker.execute(0);
  lab.medium.run_until(3500);
  EXPECT_TRUE(lab.attacker.poisoning());
  EXPECT_EQ(lab.device.arp_cache().lookup(kSrvIp, lab.medium.now()), kAtkMac);
  EXPECT_EQ(lab.server.arp_cache().lookup(kDevIp, lab.medium.now()), kAtkMac);

  // Forged replies at 200, 1200, 2200, 3200: two per round.
  std::size_t forged = 0;
  for (const auto& e : lab.medium.capture()) {
    if (e.kind != CaptureEvent::Kind::Send || e.ethertype != EtherType::Arp || e.src != kAtkMac) continue;
    const auto p = ArpPacket::decode(e.payload);
    if (p && p->op == ArpPacket::Op::Reply && p->sender_mac == kAtkMac) ++forged;
  }
  EXPECT_EQ(forged, 8u);

  lab.attacker.stop_poison(true);
  lab.medium.run();
  EXPECT_TRUE(lab.medium.idle());
  EXPECT_EQ(lab.device.arp_cache().lookup(kSrvIp, lab.medium.now()), kSrvMac);
  EXPECT_EQ(lab.server.arp_cache().lookup(kDevIp, lab.medium.now()), kDevMac);
}

TEST(Attacker, StopWithoutCorrectionLeavesCachesPoisoned) {
  Lab lab(plan({Phase::Recon, Phase::Poison}));
  lab.attacker.execute(0);
  lab.medium.run_until(500);
  lab.attacker.stop_poison(false);
  lab.medium.run();
  EXPECT_EQ(lab.device.arp_cache().lookup(kSrvIp, lab.medium.now()), kAtkMac);
}

TEST(Attacker, PassiveRelayReadsEveryPlainMessage) {
  Lab lab(plan(kPassive));
  lab.run(25);
  const InterceptLog& log = lab.attacker.log();
  EXPECT_EQ(log.telemetry_count(), 25u);
  std::size_t i = 0;
  for (const auto& e : log.entries) {
    if (!e.telemetry) {
      EXPECT_EQ(e.direction, "peer->victim");
      EXPECT_EQ(e.note, "uninteresting");
      continue;
    }
    EXPECT_EQ(e.direction, "victim->peer");
    ASSERT_TRUE(e.extraction);
    EXPECT_EQ(*e.extraction, lab.device.messages()[i].vitals);
    EXPECT_EQ(e.forwarded, e.original);
    ++i;
  }
  ASSERT_EQ(lab.server.log().records.size(), 25u);
  for (const auto& r : lab.server.log().records) {
    EXPECT_EQ(r.via_mac, kAtkMac);
    EXPECT_EQ(r.source_ip, kDevIp);
  }
  // Acks came back through the attacker and closed every message.
  for (const auto& m : lab.device.messages()) EXPECT_TRUE(m.acked_at);
}

TEST(Attacker, ActiveRulesRewriteSelectedMessages) {
  Lab lab(plan(kActive, {plain_rule(1, "45", "95.2")}));
  lab.run(3);
  const auto& records = lab.server.log().records;
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].vitals, lab.device.messages()[0].vitals);
  EXPECT_EQ(records[1].vitals, (wire::VitalSigns{45, 952}));
  EXPECT_EQ(records[2].vitals, lab.device.messages()[2].vitals);

  const ImpactReport report = assess(lab.attacker.log(), lab.server.log());
  EXPECT_EQ(report.intercepted, 3u);
  EXPECT_EQ(report.readable, 3u);
  EXPECT_EQ(report.tampered, 1u);
  EXPECT_EQ(report.accepted_despite_tamper, 1u);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_EQ(report.rows[0].tampered, (wire::VitalSigns{45, 952}));
  EXPECT_EQ(report.rows[0].detection, Detection::None);
}

TEST(Attacker, EncryptedTrafficIsOpaqueAndTamperIsRejected) {
  TamperRule r;
  r.target = TamperRule::Target::CiphertextByte;
  r.action = TamperRule::Action::RandomByte;
  Lab lab(plan(kActive, {r}), encrypted_device(), encrypted_server());
  lab.run(30);
  const ImpactReport report = assess(lab.attacker.log(), lab.server.log());
  EXPECT_EQ(report.intercepted, 30u);
  EXPECT_EQ(report.readable, 0u);
  EXPECT_EQ(report.tampered, 30u);
  EXPECT_EQ(report.accepted_despite_tamper, 0u);
  for (const auto& row : report.rows) {
    EXPECT_EQ(row.verdict, Verdict::Rejected);
    EXPECT_TRUE(row.detection == Detection::PaddingError || row.detection == Detection::ParseError);
  }
}

TEST(Attacker, IvBitFlipIsFlaggedBeyondPaper) {
  // Byte 13 of the plaintext is the first heart-rate digit; flipping its low
  // bit through the IV turns '7' into '6' without breaking the padding.
  TamperRule r;
  r.target = TamperRule::Target::IvBit;
  r.action = TamperRule::Action::FlipBit;
  r.index = 13 * 8 + 7;
  DeviceConfig d = encrypted_device();
  d.script = {{78, 986}};
  Lab lab(plan(kActive, {r}), d, encrypted_server());
  lab.run(1);
  const ImpactReport report = assess(lab.attacker.log(), lab.server.log());
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_TRUE(report.rows[0].beyond_paper);
  EXPECT_EQ(report.rows[0].verdict, Verdict::Accepted);
  EXPECT_EQ(report.rows[0].tampered, (wire::VitalSigns{68, 986}));
  EXPECT_EQ(report.accepted_despite_tamper, 0u);
  EXPECT_EQ(report.beyond_paper_accepted, 1u);
  EXPECT_NE(report.to_markdown().find("beyond-paper"), std::string::npos);
}

TEST(Assess, RejectsMismatchedOrShortLogs) {
  Lab lab(plan(kPassive));
  lab.run(3);
  ServerLog other = lab.server.log();
  other.run_id = "different";
  EXPECT_THROW(assess(lab.attacker.log(), other), AssessError);
  ServerLog shorter = lab.server.log();
  shorter.records.pop_back();
  EXPECT_THROW(assess(lab.attacker.log(), shorter), AssessError);
}

TEST(ImpactReport, MarkdownAndJsonShapes) {
  Lab lab(plan(kActive, {plain_rule(0, "180", "102.5")}));
  lab.run(1);
  const ImpactReport report = assess(lab.attacker.log(), lab.server.log());
  const std::string md = report.to_markdown();
  EXPECT_EQ(md.rfind("| Original Heart Rate (BPM) | Tampered Heart Rate (BPM) | Original Temperature (°F) | "
                     "Tampered Temperature (°F) | Detection by Server |",
                     0),
            0u);
  EXPECT_NE(md.find("| 180 |"), std::string::npos);
  const std::string json = report.to_json();
  EXPECT_NE(json.find("\"accepted_despite_tamper\": 1"), std::string::npos);
  EXPECT_NE(json.find("\"temperature_f\": 102.5"), std::string::npos);
}
