#include "medsec/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "json_support.hpp"
#include "medsec/paper_preset_data.hpp"

namespace medsec {
namespace detail {
namespace {

bench::Distribution distribution_from_json(const Json& j, const std::string& path) {
  expect_object(j, path);
  const std::string family = get_string(require(j, path, "family"), join_key(path, "family"));
  auto num = [&](std::string_view key) { return get_number(require(j, path, key), join_key(path, key)); };
  if (family == "point") {
    check_keys(j, path, {"family", "value"});
    return bench::Distribution::point(num("value"));
  }
  if (family == "normal") {
    check_keys(j, path, {"family", "mean", "sd"});
    return bench::Distribution::normal(num("mean"), num("sd"));
  }
  if (family == "uniform") {
    check_keys(j, path, {"family", "min", "max"});
    return bench::Distribution::uniform(num("min"), num("max"));
  }
  throw ConfigError(join_key(path, "family"), join_key(path, "family") + ": unknown family '" + family + "'");
}

bench::ModeCosts costs_from_json(const Json& j, const std::string& path) {
  check_keys(j, path,
             {"sensor_read_ms", "serialize_ms", "crypto_ms_per_block", "per_byte_ms", "server_ms", "network"});
  bench::ModeCosts c;
  auto opt = [&](std::string_view key, double& out) {
    if (auto it = j.find(key); it != j.end()) out = get_number(*it, join_key(path, key));
  };
  opt("sensor_read_ms", c.sensor_read_ms);
  opt("serialize_ms", c.serialize_ms);
  opt("crypto_ms_per_block", c.crypto_ms_per_block);
  opt("per_byte_ms", c.per_byte_ms);
  opt("server_ms", c.server_ms);
  c.network = distribution_from_json(require(j, path, "network"), join_key(path, "network"));
  c.validate(path);
  return c;
}

bench::ModeLoss mode_loss_from_json(const Json& j, const std::string& path) {
  check_keys(j, path, {"drop_probability", "retry_timeout_ms", "gap_probability"});
  bench::ModeLoss l;
  l.drop_probability = get_number(require(j, path, "drop_probability"), join_key(path, "drop_probability"));
  l.retry_timeout_ms = get_int(require(j, path, "retry_timeout_ms"), join_key(path, "retry_timeout_ms"));
  if (auto it = j.find("gap_probability"); it != j.end()) {
    l.gap_probability = get_number(*it, join_key(path, "gap_probability"));
  }
  return l;
}

bench::ModeResources mode_resources_from_json(const Json& j, const std::string& path) {
  check_keys(j, path, {"cpu_pct", "memory_kb", "flash_kb", "power_ma"});
  auto num = [&](std::string_view key) { return get_number(require(j, path, key), join_key(path, key)); };
  return bench::ModeResources{num("cpu_pct"), num("memory_kb"), num("flash_kb"), num("power_ma")};
}

}  // namespace

bench::LatencyModel latency_from_json(const Json& j, const std::string& path) {
  check_keys(j, path, {"plain", "encrypted"});
  bench::LatencyModel m;
  m.plain = costs_from_json(require(j, path, "plain"), join_key(path, "plain"));
  m.encrypted = costs_from_json(require(j, path, "encrypted"), join_key(path, "encrypted"));
  return m;
}

bench::LossModel loss_from_json(const Json& j, const std::string& path) {
  check_keys(j, path, {"plain", "encrypted", "max_retries"});
  bench::LossModel m;
  m.plain = mode_loss_from_json(require(j, path, "plain"), join_key(path, "plain"));
  m.encrypted = mode_loss_from_json(require(j, path, "encrypted"), join_key(path, "encrypted"));
  if (auto it = j.find("max_retries"); it != j.end()) {
    m.max_retries = static_cast<int>(get_int(*it, join_key(path, "max_retries")));
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, path + ": " + e.what());
  }
  return m;
}

bench::ResourcePreset resources_from_json(const Json& j, const std::string& path) {
  check_keys(j, path, {"plain", "encrypted"});
  return bench::ResourcePreset{mode_resources_from_json(require(j, path, "plain"), join_key(path, "plain")),
                               mode_resources_from_json(require(j, path, "encrypted"), join_key(path, "encrypted"))};
}

}  // namespace detail

namespace bench {
namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
  return s;
}

std::string signed_fixed(double v, int decimals) {
  std::string s = fixed(v, decimals);
  return s.front() == '-' ? s : "+" + s;
}

/// Up to two decimals, trailing zeros dropped.
std::string compact(double v) {
  std::string s = fixed(v, 2);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

std::string percent(double fraction) { return fixed(fraction * 100.0, 2) + "%"; }

struct Table {
  std::string title;
  std::string caption;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<Table> build_tables(const BenchReport& r) {
  const bool both = r.plain && r.encrypted;
  std::vector<Table> tables;

  Table latency{"Latency Impact Assessment",
                "Calibrated cost model (" + r.preset_name +
                    " preset) in simulated milliseconds over first-attempt deliveries.",
                {"Transmission Type", "Average Latency (ms)", "Standard Deviation (ms)", "Minimum (ms)", "Maximum (ms)"},
                {}};
  auto latency_row = [](const std::string& label, const std::optional<ModeSummary>& s) {
    if (!s || !s->latency) return std::vector<std::string>{label, "", "", "", ""};
    const LatencyStats& st = *s->latency;
    return std::vector<std::string>{label, fixed(st.mean, 2), fixed(st.sd, 2), fixed(st.min, 2), fixed(st.max, 2)};
  };
  if (r.plain) latency.rows.push_back(latency_row("Unencrypted", r.plain));
  if (r.encrypted) latency.rows.push_back(latency_row("Encrypted", r.encrypted));
  if (both && r.plain->latency && r.encrypted->latency) {
    const LatencyStats& p = *r.plain->latency;
    const LatencyStats& e = *r.encrypted->latency;
    latency.rows.push_back({"Increase",
                            signed_fixed(e.mean - p.mean, 2) + " (" +
                                signed_fixed(percent_increase(p.mean, e.mean), 2) + "%)",
                            signed_fixed(e.sd - p.sd, 2), signed_fixed(e.min - p.min, 2),
                            signed_fixed(e.max - p.max, 2)});
  } else {
    latency.rows.push_back({"Increase", "", "", "", ""});
  }
  tables.push_back(std::move(latency));

  Table resources{"Resource Utilization Analysis",
                  "Values are modeled (" + r.preset_name + " preset), not measured.",
                  {"System Resource", "Unencrypted Usage", "Encrypted Usage", "Percentage Increase"},
                  {}};
  auto resource_row = [&](const std::string& label, double p, double e, const std::string& unit) {
    resources.rows.push_back({label, compact(p) + unit, compact(e) + unit, signed_fixed(percent_increase(p, e), 1) + "%"});
  };
  const ModeResources& rp = r.resources.plain;
  const ModeResources& re = r.resources.encrypted;
  resource_row("CPU Utilization", rp.cpu_pct, re.cpu_pct, "%");
  resource_row("Memory Usage", rp.memory_kb, re.memory_kb, " KB");
  resource_row("Flash Storage", rp.flash_kb, re.flash_kb, " KB");
  resource_row("Power Consumption", rp.power_ma, re.power_ma, " mA");
  tables.push_back(std::move(resources));

  Table reliability{"Transmission Reliability Metrics",
                    "Simulated loss and retry model (" + r.preset_name + " preset).",
                    {"Performance Metric", "Unencrypted System", "Encrypted System", "Performance Impact"},
                    {}};
  auto cell = [](const std::optional<ModeSummary>& s, auto&& f) { return s ? f(*s) : std::string(); };
  auto recovery = [](const ModeSummary& s) {
    return s.mean_recovery_ms ? fixed(*s.mean_recovery_ms / 1000.0, 2) + " seconds" : std::string("n/a");
  };
  std::string success_delta, recovery_delta, stability_delta;
  if (both) {
    success_delta = signed_fixed((r.encrypted->success_rate - r.plain->success_rate) * 100.0, 2) + "%";
    stability_delta = signed_fixed((r.encrypted->stability - r.plain->stability) * 100.0, 2) + "%";
    if (r.plain->mean_recovery_ms && r.encrypted->mean_recovery_ms) {
      recovery_delta = signed_fixed(percent_increase(*r.plain->mean_recovery_ms, *r.encrypted->mean_recovery_ms), 2) + "%";
    }
  }
  reliability.rows.push_back({"Packet Success Rate",
                              cell(r.plain, [](const ModeSummary& s) { return percent(s.success_rate); }),
                              cell(r.encrypted, [](const ModeSummary& s) { return percent(s.success_rate); }),
                              success_delta});
  reliability.rows.push_back({"Error Recovery Time", cell(r.plain, recovery), cell(r.encrypted, recovery), recovery_delta});
  reliability.rows.push_back({"Connection Stability",
                              cell(r.plain, [](const ModeSummary& s) { return percent(s.stability); }),
                              cell(r.encrypted, [](const ModeSummary& s) { return percent(s.stability); }),
                              stability_delta});
  tables.push_back(std::move(reliability));
  return tables;
}

std::string join(const std::vector<std::string>& cells, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += sep;
    out += cells[i];
  }
  return out;
}

}  // namespace

double Distribution::sample(Rng& rng) const {
  switch (family) {
    case Family::Point:
      return a;
    case Family::Normal:
      return std::max(0.0, rng.normal(a, b));
    case Family::Uniform:
      return a + (b - a) * rng.uniform01();
  }
  return 0;
}

void Distribution::validate(const std::string& key) const {
  switch (family) {
    case Family::Point:
      if (a < 0) throw ConfigError(key, key + ": point value must be >= 0");
      break;
    case Family::Normal:
      if (b < 0) throw ConfigError(key, key + ": sd must be >= 0");
      break;
    case Family::Uniform:
      if (a < 0 || b < a) throw ConfigError(key, key + ": need 0 <= min <= max");
      break;
  }
}

void ModeCosts::validate(const std::string& key) const {
  for (double v : {sensor_read_ms, serialize_ms, crypto_ms_per_block, per_byte_ms, server_ms}) {
    if (v < 0 || !std::isfinite(v)) throw ConfigError(key, key + ": costs must be finite and >= 0");
  }
  network.validate(detail::join_key(key, "network"));
}

void LatencyModel::validate() const {
  plain.validate("latency.plain");
  encrypted.validate("latency.encrypted");
}

void LossModel::validate() const {
  for (const ModeLoss* m : {&plain, &encrypted}) {
    if (!(m->drop_probability >= 0 && m->drop_probability <= 1)) {
      throw std::invalid_argument("drop_probability must be in [0,1]");
    }
    if (!(m->gap_probability >= 0 && m->gap_probability <= 1)) {
      throw std::invalid_argument("gap_probability must be in [0,1]");
    }
    if (m->retry_timeout_ms <= 0) throw std::invalid_argument("retry_timeout_ms must be > 0");
  }
  if (max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
}

Preset parse_preset_json(std::string_view text) {
  detail::Json j;
  try {
    j = detail::Json::parse(text);
  } catch (const detail::Json::parse_error& e) {
    throw ConfigError("", std::string("preset is not valid JSON: ") + e.what());
  }
  detail::check_keys(j, "", {"name", "latency", "loss", "resources"});
  Preset p;
  p.name = detail::get_string(detail::require(j, "", "name"), "name");
  p.latency = detail::latency_from_json(detail::require(j, "", "latency"), "latency");
  p.loss = detail::loss_from_json(detail::require(j, "", "loss"), "loss");
  p.resources = detail::resources_from_json(detail::require(j, "", "resources"), "resources");
  return p;
}

const Preset& paper_preset() {
  static const Preset preset = parse_preset_json(kPaperPresetJson);
  return preset;
}

const Preset& preset_by_name(std::string_view name) {
  if (name == "paper") return paper_preset();
  throw ConfigError("preset", "unknown preset: " + std::string(name));
}

double draw_latency(const LatencyModel& model, Mode mode, MessageShape shape, Rng& rng) {
  const ModeCosts& c = model.for_mode(mode);
  const double fixed_part = c.sensor_read_ms + c.serialize_ms +
                            c.per_byte_ms * static_cast<double>(shape.wire_bytes) +
                            c.crypto_ms_per_block * static_cast<double>(shape.cipher_blocks) + c.server_ms;
  return fixed_part + c.network.sample(rng);
}

LatencyStats latency_stats(std::span<const double> samples) {
  if (samples.empty()) throw StatsError("latency_stats: no samples");
  LatencyStats s;
  s.n = samples.size();
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(s.n);
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  s.min = *lo;
  s.max = *hi;
  if (s.n > 1) {
    double ss = 0;
    for (double v : samples) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

double percent_increase(double a, double b) { return (b - a) / a * 100.0; }

void write_samples_jsonl(std::ostream& out, std::span<const LatencySample> samples) {
  for (const auto& s : samples) {
    detail::Json j;
    j["mode"] = to_string(s.mode);
    j["seq"] = s.seq;
    j["latency_ms"] = s.latency_ms ? detail::Json(*s.latency_ms) : detail::Json(nullptr);
    j["dropped"] = s.dropped;
    j["recovery_ms"] = s.recovery_ms ? detail::Json(*s.recovery_ms) : detail::Json(nullptr);
    out << j.dump() << '\n';
  }
}

std::vector<LatencySample> read_samples_jsonl(std::istream& in) {
  std::vector<LatencySample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = "samples line " + std::to_string(lineno);
    detail::Json j;
    try {
      j = detail::Json::parse(line);
    } catch (const detail::Json::parse_error&) {
      throw ConfigError(where, where + ": invalid JSON");
    }
    detail::check_keys(j, where, {"mode", "seq", "latency_ms", "dropped", "recovery_ms"});
    LatencySample s;
    try {
      s.mode = parse_mode(detail::get_string(detail::require(j, where, "mode"), where + ".mode"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ".mode", e.what());
    }
    s.seq = detail::get_uint(detail::require(j, where, "seq"), where + ".seq");
    if (const auto& v = detail::require(j, where, "latency_ms"); !v.is_null()) {
      s.latency_ms = detail::get_number(v, where + ".latency_ms");
    }
    s.dropped = detail::get_bool(detail::require(j, where, "dropped"), where + ".dropped");
    if (const auto& v = detail::require(j, where, "recovery_ms"); !v.is_null()) {
      s.recovery_ms = detail::get_number(v, where + ".recovery_ms");
    }
    out.push_back(s);
  }
  return out;
}

std::size_t draw_gaps(std::uint64_t seed, Mode mode, std::size_t messages, double gap_probability) {
  Rng rng = Rng::stream(seed, (static_cast<std::uint64_t>(RngStream::Gap) << 8) | (mode == Mode::Plain ? 0u : 1u));
  std::size_t gaps = 0;
  for (std::size_t i = 0; i < messages; ++i) gaps += rng.bernoulli(gap_probability) ? 1 : 0;
  return gaps;
}

std::optional<ModeSummary> summarize(std::span<const LatencySample> samples, Mode mode, std::size_t gaps) {
  ModeSummary s;
  std::vector<double> latencies;
  std::vector<double> recoveries;
  std::size_t delivered_first = 0;
  for (const auto& x : samples) {
    if (x.mode != mode) continue;
    ++s.messages;
    if (!x.dropped) {
      ++delivered_first;
      if (x.latency_ms) latencies.push_back(*x.latency_ms);
    }
    if (x.recovery_ms) recoveries.push_back(*x.recovery_ms);
  }
  if (s.messages == 0) return std::nullopt;
  const double n = static_cast<double>(s.messages);
  if (!latencies.empty()) s.latency = latency_stats(latencies);
  s.success_rate = static_cast<double>(delivered_first) / n;
  if (!recoveries.empty()) {
    s.mean_recovery_ms = std::accumulate(recoveries.begin(), recoveries.end(), 0.0) /
                         static_cast<double>(recoveries.size());
  }
  s.stability = std::max(0.0, 1.0 - static_cast<double>(gaps) / n);
  return s;
}

BenchReport build_report(std::vector<LatencySample> samples, const Preset& preset, std::uint64_t seed) {
  BenchReport r;
  r.preset_name = preset.name;
  r.resources = preset.resources;
  for (Mode mode : {Mode::Plain, Mode::Encrypted}) {
    const auto n = static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [mode](const LatencySample& s) { return s.mode == mode; }));
    const std::size_t gaps = draw_gaps(seed, mode, n, preset.loss.for_mode(mode).gap_probability);
    (mode == Mode::Plain ? r.plain : r.encrypted) = summarize(samples, mode, gaps);
  }
  r.samples = std::move(samples);
  return r;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "md" || name == "markdown") return ReportFormat::Markdown;
  if (name == "csv") return ReportFormat::Csv;
  throw ConfigError("format", "unknown report format: " + std::string(name));
}

std::string render_report(const BenchReport& report, ReportFormat format) {
  std::ostringstream out;
  bool first = true;
  for (const Table& t : build_tables(report)) {
    if (!first) out << '\n';
    first = false;
    if (format == ReportFormat::Markdown) {
      out << "## " << t.title << "\n\n" << t.caption << "\n\n";
      out << "| " << join(t.header, " | ") << " |\n";
      out << "|";
      for (std::size_t i = 0; i < t.header.size(); ++i) out << "---|";
      out << '\n';
      for (const auto& row : t.rows) out << "| " << join(row, " | ") << " |\n";
    } else {
      out << "# " << t.title << ": " << t.caption << '\n';
      out << join(t.header, ",") << '\n';
      for (const auto& row : t.rows) out << join(row, ",") << '\n';
    }
  }
  return out.str();
}

}  // namespace bench
}  // namespace medsec
