#include "medsec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "json_support.hpp"

namespace medsec {
namespace {

using detail::check_keys;
using detail::get_bool;
using detail::get_int;
using detail::get_number;
using detail::get_string;
using detail::get_uint;
using detail::join_key;
using detail::Json;

const char* const kRoles[] = {"gateway", "device", "server", "attacker"};

Role parse_role(const std::string& name, const std::string& key) {
  for (int i = 0; i < 4; ++i) {
    if (name == kRoles[i]) return static_cast<Role>(i);
  }
  throw ConfigError(key, key + ": unknown role '" + name + "'");
}

/// Wraps the std::invalid_argument-style parsers so failures name the key.
template <class F>
auto keyed(const std::string& key, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, key + ": " + e.what());
  }
}

/// Validation messages lead with the dotted field name ("device.key ...");
/// use it as the error key when it belongs to `section`.
template <class F>
void validated(const std::string& section, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    const std::string field = what.substr(0, what.find(' '));
    const bool named = field.rfind(section + ".", 0) == 0;
    throw ConfigError(named ? field : section, named ? what : section + ": " + what);
  }
}

Range int_range(const Json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(key, key + ": expected [min, max]");
  return Range{static_cast<int>(get_int(j[0], key)), static_cast<int>(get_int(j[1], key))};
}

int to_tenths(double degrees) { return static_cast<int>(std::lround(degrees * 10.0)); }

Range tenths_range(const Json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(key, key + ": expected [min, max]");
  return Range{to_tenths(get_number(j[0], key)), to_tenths(get_number(j[1], key))};
}

/// Rule values may be written as JSON strings or numbers.
std::string value_text(const Json& j, const std::string& key) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  throw ConfigError(key, key + ": expected a string or number");
}

Topology parse_topology(const Json& j) {
  check_keys(j, "topology", {"nodes"});
  const Json& nodes = detail::require(j, "topology", "nodes");
  if (!nodes.is_array()) throw ConfigError("topology.nodes", "topology.nodes: expected an array");
  Topology t;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "topology.nodes[" + std::to_string(i) + "]";
    check_keys(nodes[i], path, {"role", "name", "mac", "ip"});
    NodeSpec n;
    n.role = parse_role(get_string(detail::require(nodes[i], path, "role"), path + ".role"), path + ".role");
    n.name = nodes[i].contains("name") ? get_string(nodes[i]["name"], path + ".name") : std::string(to_string(n.role));
    n.mac = keyed(path + ".mac",
                  [&] { return MacAddr::parse(get_string(detail::require(nodes[i], path, "mac"), path + ".mac")); });
    n.ip = keyed(path + ".ip",
                 [&] { return IpAddr4::parse(get_string(detail::require(nodes[i], path, "ip"), path + ".ip")); });
    t.nodes.push_back(n);
  }
  return t;
}

void parse_device(const Json& j, DeviceConfig& d) {
  const std::string p = "device";
  check_keys(j, p,
             {"id", "mode", "sample_interval_ms", "key", "hr_range", "temp_range", "retry_timeout_ms", "max_retries",
              "encoding", "framing", "fidelity_iv", "script"});
  for (const auto& [key, v] : j.items()) {
    const std::string k = join_key(p, key);
    if (key == "id") {
      d.device_id = get_string(v, k);
    } else if (key == "mode") {
      d.mode = keyed(k, [&] { return parse_mode(get_string(v, k)); });
    } else if (key == "sample_interval_ms") {
      d.sample_interval_ms = get_int(v, k);
    } else if (key == "key") {
      d.key = keyed(k, [&] { return crypto::Key128::from_hex(get_string(v, k)); });
    } else if (key == "hr_range") {
      d.hr_range = int_range(v, k);
    } else if (key == "temp_range") {
      d.temp_range = tenths_range(v, k);
    } else if (key == "retry_timeout_ms") {
      d.retry_timeout_ms = get_int(v, k);
    } else if (key == "max_retries") {
      d.max_retries = static_cast<int>(get_int(v, k));
    } else if (key == "encoding") {
      d.encoding = keyed(k, [&] { return crypto::parse_text_encoding(get_string(v, k)); });
    } else if (key == "framing") {
      d.framing = keyed(k, [&] { return wire::parse_framing(get_string(v, k)); });
    } else if (key == "fidelity_iv") {
      const Bytes raw = keyed(k, [&] { return crypto::decode_text(get_string(v, k), crypto::TextEncoding::Hex); });
      if (raw.size() != crypto::kBlockSize) throw ConfigError(k, k + ": expected 32 hex digits");
      std::copy(raw.begin(), raw.end(), d.fidelity_iv.bytes.begin());
    } else if (key == "script") {
      if (!v.is_array()) throw ConfigError(k, k + ": expected an array");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string sp = k + "[" + std::to_string(i) + "]";
        check_keys(v[i], sp, {"heart_rate", "temperature"});
        wire::VitalSigns s;
        s.heart_rate_bpm = static_cast<int>(get_int(detail::require(v[i], sp, "heart_rate"), sp + ".heart_rate"));
        s.temperature_df = to_tenths(get_number(detail::require(v[i], sp, "temperature"), sp + ".temperature"));
        d.script.push_back(s);
      }
    }
  }
}

void parse_server(const Json& j, ServerConfig& s) {
  const std::string p = "server";
  check_keys(j, p, {"validate_ranges", "replay_defense", "plausible_hr", "plausible_temp"});
  for (const auto& [key, v] : j.items()) {
    const std::string k = join_key(p, key);
    if (key == "validate_ranges") {
      s.validate_ranges = get_bool(v, k);
    } else if (key == "replay_defense") {
      s.replay_defense = get_bool(v, k);
    } else if (key == "plausible_hr") {
      s.plausible_hr = int_range(v, k);
    } else if (key == "plausible_temp") {
      s.plausible_temp = tenths_range(v, k);
    }
  }
}

TamperRule parse_rule(const Json& j, const std::string& p) {
  check_keys(j, p, {"target", "action", "fields", "index", "value", "message"});
  TamperRule r;
  const std::string target = get_string(detail::require(j, p, "target"), p + ".target");
  if (target == "plain_field") {
    r.target = TamperRule::Target::PlainField;
  } else if (target == "ciphertext_byte") {
    r.target = TamperRule::Target::CiphertextByte;
    r.action = TamperRule::Action::RandomByte;
  } else if (target == "iv_bit") {
    r.target = TamperRule::Target::IvBit;
    r.action = TamperRule::Action::FlipBit;
  } else {
    throw ConfigError(p + ".target", p + ".target: unknown target '" + target + "'");
  }
  if (j.contains("action")) {
    const std::string action = get_string(j["action"], p + ".action");
    if (action == "set_value") {
      r.action = TamperRule::Action::SetValue;
    } else if (action == "random_byte") {
      r.action = TamperRule::Action::RandomByte;
    } else if (action == "flip_bit") {
      r.action = TamperRule::Action::FlipBit;
    } else {
      throw ConfigError(p + ".action", p + ".action: unknown action '" + action + "'");
    }
  }
  if (j.contains("fields")) {
    const Json& f = j["fields"];
    detail::expect_object(f, p + ".fields");
    for (const auto& [field, value] : f.items()) r.fields.emplace_back(field, value_text(value, p + ".fields." + field));
  }
  if (j.contains("index")) r.index = get_uint(j["index"], p + ".index");
  if (j.contains("value")) {
    const auto v = get_uint(j["value"], p + ".value");
    if (v > 255) throw ConfigError(p + ".value", p + ".value: must be a byte");
    r.value = static_cast<Byte>(v);
  }
  if (j.contains("message")) r.message = get_uint(j["message"], p + ".message");
  keyed(p, [&] {
    r.validate();
    return 0;
  });
  return r;
}

AttackPlan parse_attack(const Json& j, const Topology& topology) {
  const std::string p = "attack";
  check_keys(j, p,
             {"phases", "victim", "peer", "rules", "repoison_interval_ms", "recon_timeout_ms", "scan_range",
              "restore_on_stop"});
  AttackPlan plan;
  plan.victim_ip = topology.require(Role::Device).ip;
  plan.peer_ip = topology.require(Role::Server).ip;
  const Json& phases = detail::require(j, p, "phases");
  if (!phases.is_array()) throw ConfigError("attack.phases", "attack.phases: expected an array");
  for (const auto& ph : phases) {
    plan.phases.push_back(keyed("attack.phases", [&] { return parse_phase(get_string(ph, "attack.phases")); }));
  }
  for (const auto& [key, v] : j.items()) {
    const std::string k = join_key(p, key);
    if (key == "victim") {
      plan.victim_ip = keyed(k, [&] { return IpAddr4::parse(get_string(v, k)); });
    } else if (key == "peer") {
      plan.peer_ip = keyed(k, [&] { return IpAddr4::parse(get_string(v, k)); });
    } else if (key == "rules") {
      if (!v.is_array()) throw ConfigError(k, k + ": expected an array");
      for (std::size_t i = 0; i < v.size(); ++i) plan.rules.push_back(parse_rule(v[i], k + "[" + std::to_string(i) + "]"));
    } else if (key == "repoison_interval_ms") {
      plan.repoison_interval_ms = get_int(v, k);
    } else if (key == "recon_timeout_ms") {
      plan.recon_timeout_ms = get_int(v, k);
    } else if (key == "scan_range") {
      if (!v.is_array() || v.size() != 2) throw ConfigError(k, k + ": expected [first, last]");
      plan.scan_range = std::pair{keyed(k, [&] { return IpAddr4::parse(get_string(v[0], k)); }),
                                  keyed(k, [&] { return IpAddr4::parse(get_string(v[1], k)); })};
    } else if (key == "restore_on_stop") {
      plan.restore_on_stop = get_bool(v, k);
    }
  }
  if (!topology.has_ip(plan.victim_ip)) throw ConfigError("attack.victim", "attack.victim: IP not in topology");
  if (!topology.has_ip(plan.peer_ip)) throw ConfigError("attack.peer", "attack.peer: IP not in topology");
  return plan;
}

bench::Preset parse_models(const Json& j, std::optional<bench::Preset> base) {
  check_keys(j, "models", {"latency", "loss", "resources"});
  bench::Preset p = base ? *base : bench::Preset{};
  const bool complete = base || (j.contains("latency") && j.contains("loss") && j.contains("resources"));
  if (!complete) {
    throw ConfigError("models", "models: latency, loss and resources are all required without a preset");
  }
  if (j.contains("latency")) p.latency = detail::latency_from_json(j["latency"], "models.latency");
  if (j.contains("loss")) p.loss = detail::loss_from_json(j["loss"], "models.loss");
  if (j.contains("resources")) p.resources = detail::resources_from_json(j["resources"], "models.resources");
  if (!base || !(p == *base)) p.name = "custom";
  return p;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

crypto::Key128 bench_key(const ScenarioConfig& config) {
  if (config.device.key) return *config.device.key;
  crypto::Key128 key;
  Rng rng = Rng::stream(config.seed, 0x4b4559);
  rng.fill(key.bytes);
  return key;
}

}  // namespace

std::string_view to_string(Role role) { return kRoles[static_cast<int>(role)]; }

Topology Topology::standard() {
  Topology t;
  t.nodes = {
      {Role::Gateway, "gateway", MacAddr::parse("02:00:00:00:00:01"), IpAddr4::parse("192.168.1.1")},
      {Role::Device, "device", MacAddr::parse("02:00:00:00:00:32"), IpAddr4::parse("192.168.1.50")},
      {Role::Attacker, "attacker", MacAddr::parse("02:00:00:00:00:42"), IpAddr4::parse("192.168.1.66")},
      {Role::Server, "server", MacAddr::parse("02:00:00:00:00:64"), IpAddr4::parse("192.168.1.100")},
  };
  return t;
}

const NodeSpec* Topology::find(Role role) const {
  const auto it = std::find_if(nodes.begin(), nodes.end(), [role](const NodeSpec& n) { return n.role == role; });
  return it == nodes.end() ? nullptr : &*it;
}

const NodeSpec& Topology::require(Role role) const {
  if (const NodeSpec* n = find(role)) return *n;
  throw ConfigError("topology.nodes", "topology.nodes: no " + std::string(to_string(role)) + " node");
}

bool Topology::has_ip(IpAddr4 ip) const {
  return std::any_of(nodes.begin(), nodes.end(), [ip](const NodeSpec& n) { return n.ip == ip; });
}

void ScenarioConfig::validate() const {
  for (std::size_t i = 0; i < topology.nodes.size(); ++i) {
    const NodeSpec& a = topology.nodes[i];
    const std::string key = "topology.nodes[" + std::to_string(i) + "]";
    if (a.mac.is_broadcast() || a.mac.is_zero()) throw ConfigError(key + ".mac", key + ".mac: reserved address");
    for (std::size_t k = 0; k < i; ++k) {
      const NodeSpec& b = topology.nodes[k];
      if (a.role == b.role) throw ConfigError(key + ".role", key + ".role: duplicate " + std::string(to_string(a.role)));
      if (a.mac == b.mac) throw ConfigError(key + ".mac", key + ".mac: duplicate address");
      if (a.ip == b.ip) throw ConfigError(key + ".ip", key + ".ip: duplicate address");
    }
  }
  topology.require(Role::Device);
  topology.require(Role::Server);
  if (attack) {
    topology.require(Role::Attacker);
    keyed("attack", [&] {
      attack->validate();
      return 0;
    });
  }
  validated("device", [&] { device.validate(); });
  validated("server", [&] { server.validate(); });
}

ScenarioConfig parse_config(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "",
             {"name", "seed", "messages", "preset", "topology", "device", "server", "attack", "models", "apply_loss",
              "output_dir"});
  ScenarioConfig c;
  if (!j.contains("seed")) throw ConfigError("seed", "seed required");
  c.seed = get_uint(j["seed"], "seed");
  if (j.contains("name")) c.name = get_string(j["name"], "name");
  if (j.contains("messages")) c.messages = get_uint(j["messages"], "messages");
  if (j.contains("topology")) c.topology = parse_topology(j["topology"]);
  if (j.contains("device")) parse_device(j["device"], c.device);
  if (j.contains("server")) parse_server(j["server"], c.server);
  if (j.contains("attack")) c.attack = parse_attack(j["attack"], c.topology);
  std::optional<bench::Preset> preset;
  if (j.contains("preset")) preset = bench::preset_by_name(get_string(j["preset"], "preset"));
  c.models = j.contains("models") ? parse_models(j["models"], preset) : preset;
  if (j.contains("apply_loss")) c.apply_loss = get_bool(j["apply_loss"], "apply_loss");
  if (j.contains("output_dir")) c.output_dir = get_string(j["output_dir"], "output_dir");
  if (c.apply_loss && !c.models) throw ConfigError("apply_loss", "apply_loss requires a preset or models.loss");

  c.server.mode = c.device.mode;
  c.server.key = c.device.key;
  c.server.encoding = c.device.encoding;
  c.server.framing = c.device.framing;
  c.server.fidelity_iv = c.device.fidelity_iv;
  if (c.attack) c.attack->framing = c.device.framing;
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::string make_run_id(std::string_view name, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const std::string text = std::string(name) + ":" + std::to_string(seed);
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  ScenarioResult result;
  result.run_id = make_run_id(config.name, config.seed);
  result.mode = config.device.mode;

  Medium medium;
  const Topology& topo = config.topology;
  const NodeSpec& dev_spec = topo.require(Role::Device);
  const NodeSpec& srv_spec = topo.require(Role::Server);

  std::vector<std::unique_ptr<Host>> others;
  if (const NodeSpec* g = topo.find(Role::Gateway)) {
    others.push_back(std::make_unique<Host>(g->name, g->mac, g->ip));
    medium.attach(*others.back());
  }
  Device device(dev_spec.name, dev_spec.mac, dev_spec.ip, config.device, srv_spec.ip,
                make_stream(config.seed, RngStream::Sensor), make_stream(config.seed, RngStream::Iv));
  Server server(srv_spec.name, srv_spec.mac, srv_spec.ip, config.server);
  server.set_run_id(result.run_id);
  medium.attach(device);
  medium.attach(server);

  std::unique_ptr<Attacker> attacker;
  if (config.attack) {
    const NodeSpec& a = topo.require(Role::Attacker);
    attacker = std::make_unique<Attacker>(a.name, a.mac, a.ip, *config.attack,
                                          make_stream(config.seed, RngStream::Attacker));
    attacker->set_run_id(result.run_id);
    medium.attach(*attacker);
    attacker->execute(0);
  }
  if (config.apply_loss && config.models) {
    medium.set_loss(dev_spec.mac, config.models->loss.for_mode(config.device.mode).drop_probability,
                    make_stream(config.seed, RngStream::Loss));
  }

  device.start(config.device.sample_interval_ms, config.messages, [&] {
    if (attacker) attacker->finish();
  });

  const SimTime horizon = config.device.sample_interval_ms * static_cast<SimTime>(config.messages + 1) +
                          config.device.retry_timeout_ms * (config.device.max_retries + 2) + 60'000;
  while (!medium.idle() && medium.now() <= horizon) medium.step();
  if (!device.done()) throw InvariantError("device did not resolve every message before the horizon");
  if (!medium.idle()) throw InvariantError("event queue did not drain after the device finished");

  result.capture = medium.capture();
  result.messages = device.messages();
  result.transmissions = device.transmissions();
  result.server_log = server.log();
  result.device_mac = dev_spec.mac;
  result.server_mac = srv_spec.mac;
  if (attacker) {
    result.intercepts = attacker->log();
    result.inventory = attacker->inventory();
    result.attacker_mac = attacker->mac();
    if (config.attack->has(Phase::Assess)) {
      try {
        result.impact = assess(*result.intercepts, result.server_log);
      } catch (const AssessError& e) {
        throw InvariantError(e.what());
      }
    }
  }
  if (result.server_log.records.size() > result.transmissions) {
    throw InvariantError("server logged more requests than the device transmitted");
  }
  return result;
}

RunSummary summarize(const ScenarioConfig& config, const ScenarioResult& result) {
  RunSummary s;
  s.run_id = result.run_id;
  s.name = config.name;
  s.sent = result.messages.size();
  s.transmissions = result.transmissions;
  s.received = result.server_log.records.size();
  for (const auto& r : result.server_log.records) {
    if (r.verdict == Verdict::Accepted) {
      ++s.accepted;
    } else {
      ++s.rejected[std::string(to_string(r.detection))];
    }
  }
  if (result.intercepts) {
    s.intercepted = result.intercepts->telemetry_count();
    for (const auto& e : result.intercepts->entries) {
      if (!e.telemetry) continue;
      if (e.extraction) ++s.readable;
      if (!e.rule.empty()) ++s.tampered;
    }
  }
  return s;
}

std::string RunSummary::to_json() const {
  Json j;
  j["run_id"] = run_id;
  j["name"] = name;
  Json counts;
  counts["sent"] = sent;
  counts["transmissions"] = transmissions;
  counts["received"] = received;
  counts["intercepted"] = intercepted;
  counts["readable"] = readable;
  counts["tampered"] = tampered;
  counts["accepted"] = accepted;
  Json rej = Json::object();
  for (const auto& [k, v] : rejected) rej[k] = v;
  counts["rejected"] = std::move(rej);
  j["counts"] = std::move(counts);
  j["artifacts"] = artifacts;
  return j.dump(2) + "\n";
}

RunSummary run(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
  const ScenarioResult result = run_scenario(config);
  RunSummary summary = summarize(config, result);
  std::filesystem::create_directories(out_dir);

  std::ostringstream capture;
  write_capture_jsonl(capture, result.capture);
  write_file(out_dir / "capture.jsonl", capture.str());
  summary.artifacts.push_back("capture.jsonl");

  std::ostringstream log;
  write_server_log_jsonl(log, result.server_log.records);
  write_file(out_dir / "server_log.jsonl", log.str());
  summary.artifacts.push_back("server_log.jsonl");

  if (result.impact) {
    write_file(out_dir / "impact.md", result.impact->to_markdown());
    write_file(out_dir / "impact.json", result.impact->to_json());
    summary.artifacts.push_back("impact.md");
    summary.artifacts.push_back("impact.json");
  }
  summary.artifacts.push_back("summary.json");
  write_file(out_dir / "summary.json", summary.to_json());
  return summary;
}

bench::BenchReport run_bench(const ScenarioConfig& config, std::size_t n) {
  if (n == 0) throw ConfigError("messages", "messages must be > 0");
  if (!config.models) throw ConfigError("preset", "bench requires a preset or models");
  const bench::Preset& preset = *config.models;

  std::vector<bench::LatencySample> samples;
  for (Mode mode : {Mode::Plain, Mode::Encrypted}) {
    ScenarioConfig c = config;
    c.attack.reset();
    c.messages = n;
    c.apply_loss = true;
    c.device.mode = mode;
    c.device.key = bench_key(config);
    c.device.retry_timeout_ms = preset.loss.for_mode(mode).retry_timeout_ms;
    c.device.max_retries = preset.loss.max_retries;
    c.server.mode = mode;
    c.server.key = c.device.key;
    const ScenarioResult result = run_scenario(c);

    // Same stream for both modes: paired draws share their network noise.
    Rng latency_rng = make_stream(config.seed, RngStream::Latency);
    for (const MessageRecord& m : result.messages) {
      const double draw =
          bench::draw_latency(preset.latency, mode, bench::MessageShape{m.wire_bytes, m.cipher_blocks}, latency_rng);
      bench::LatencySample s;
      s.mode = mode;
      s.seq = m.seq;
      s.dropped = m.first_attempt_failed() || m.skipped;
      if (const auto rec = m.recovery_ms()) s.recovery_ms = static_cast<double>(*rec);
      if (m.acked_at) s.latency_ms = s.recovery_ms ? draw + *s.recovery_ms : draw;
      samples.push_back(s);
    }
  }
  return bench::build_report(std::move(samples), preset, config.seed);
}

bench::BenchReport write_bench(const ScenarioConfig& config, std::size_t n, const std::filesystem::path& out_dir) {
  bench::BenchReport report = run_bench(config, n);
  std::filesystem::create_directories(out_dir);
  std::ostringstream samples;
  bench::write_samples_jsonl(samples, report.samples);
  write_file(out_dir / "samples.jsonl", samples.str());
  write_file(out_dir / "report.md", bench::render_report(report, bench::ReportFormat::Markdown));
  write_file(out_dir / "report.csv", bench::render_report(report, bench::ReportFormat::Csv));
  return report;
}

std::string rerender_report(const ScenarioConfig& config, const std::filesystem::path& samples_path,
                            bench::ReportFormat format) {
  if (!config.models) throw ConfigError("preset", "report requires a preset or models");
  std::ifstream in(samples_path);
  if (!in) throw ConfigError("samples", "cannot open " + samples_path.string());
  auto samples = bench::read_samples_jsonl(in);
  return bench::render_report(bench::build_report(std::move(samples), *config.models, config.seed), format);
}

}  // namespace medsec
