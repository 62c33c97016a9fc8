#pragma once

// Latency/loss cost model, summary statistics and the comparative report.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "medsec/endpoints.hpp"
#include "medsec/rng.hpp"

namespace medsec {

/// Invalid configuration. `key()` is the dotted path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message) : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

namespace bench {

class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Nonnegative delay distribution. Normal draws are truncated at 0.
struct Distribution {
  enum class Family { Point, Normal, Uniform };

  Family family = Family::Point;
  double a = 0;  // point value, normal mean, uniform min
  double b = 0;  // normal sd, uniform max

  static Distribution point(double v) { return {Family::Point, v, 0}; }
  static Distribution normal(double mean, double sd) { return {Family::Normal, mean, sd}; }
  static Distribution uniform(double lo, double hi) { return {Family::Uniform, lo, hi}; }

  double sample(Rng& rng) const;
  void validate(const std::string& key) const;
  friend bool operator==(const Distribution&, const Distribution&) = default;
};

struct ModeCosts {
  double sensor_read_ms = 0;
  double serialize_ms = 0;
  double crypto_ms_per_block = 0;
  double per_byte_ms = 0;
  double server_ms = 0;
  Distribution network;

  void validate(const std::string& key) const;
  friend bool operator==(const ModeCosts&, const ModeCosts&) = default;
};

struct LatencyModel {
  ModeCosts plain;
  ModeCosts encrypted;

  const ModeCosts& for_mode(Mode mode) const { return mode == Mode::Plain ? plain : encrypted; }
  void validate() const;
  friend bool operator==(const LatencyModel&, const LatencyModel&) = default;
};

struct ModeLoss {
  double drop_probability = 0;
  SimTime retry_timeout_ms = 2300;
  /// Per-message probability of a long connectivity gap.
  double gap_probability = 0;

  friend bool operator==(const ModeLoss&, const ModeLoss&) = default;
};

struct LossModel {
  ModeLoss plain;
  ModeLoss encrypted;
  int max_retries = 3;

  const ModeLoss& for_mode(Mode mode) const { return mode == Mode::Plain ? plain : encrypted; }
  void validate() const;
  friend bool operator==(const LossModel&, const LossModel&) = default;
};

struct ModeResources {
  double cpu_pct = 0;
  double memory_kb = 0;
  double flash_kb = 0;
  double power_ma = 0;

  friend bool operator==(const ModeResources&, const ModeResources&) = default;
};

/// Declared values echoed into reports; nothing here is measured.
struct ResourcePreset {
  ModeResources plain;
  ModeResources encrypted;

  friend bool operator==(const ResourcePreset&, const ResourcePreset&) = default;
};

struct Preset {
  std::string name;
  LatencyModel latency;
  LossModel loss;
  ResourcePreset resources;

  friend bool operator==(const Preset&, const Preset&) = default;
};

/// Parses a preset document. Throws ConfigError.
Preset parse_preset_json(std::string_view text);
/// The bundled "paper" preset.
const Preset& paper_preset();
/// Throws ConfigError(key "preset") for unknown names.
const Preset& preset_by_name(std::string_view name);

struct MessageShape {
  std::size_t wire_bytes = 0;
  std::size_t cipher_blocks = 0;
};

/// Sensor read + serialize + per-byte cost + crypto per block + network draw
/// + server processing.
double draw_latency(const LatencyModel& model, Mode mode, MessageShape shape, Rng& rng);

struct LatencyStats {
  std::size_t n = 0;
  double mean = 0;
  double sd = 0;  // n-1 denominator, 0 when n == 1
  double min = 0;
  double max = 0;
};

/// Throws StatsError on empty input.
LatencyStats latency_stats(std::span<const double> samples);

/// (b - a) / a * 100.
double percent_increase(double a, double b);

struct LatencySample {
  Mode mode = Mode::Plain;
  std::uint64_t seq = 0;
  std::optional<double> latency_ms;  // empty when the message was lost
  bool dropped = false;              // first attempt failed
  std::optional<double> recovery_ms;

  friend bool operator==(const LatencySample&, const LatencySample&) = default;
};

/// {mode, seq, latency_ms, dropped, recovery_ms}, one per line.
void write_samples_jsonl(std::ostream& out, std::span<const LatencySample> samples);
/// Throws ConfigError on malformed lines.
std::vector<LatencySample> read_samples_jsonl(std::istream& in);

/// Long-gap events in `messages` sends, drawn from the seed's gap stream.
std::size_t draw_gaps(std::uint64_t seed, Mode mode, std::size_t messages, double gap_probability);

struct ModeSummary {
  std::size_t messages = 0;
  /// Over messages delivered on the first attempt.
  std::optional<LatencyStats> latency;
  double success_rate = 0;
  std::optional<double> mean_recovery_ms;
  double stability = 0;
};

/// Empty `samples` for the mode gives an empty optional.
std::optional<ModeSummary> summarize(std::span<const LatencySample> samples, Mode mode, std::size_t gaps);

struct BenchReport {
  std::string preset_name;
  std::optional<ModeSummary> plain;
  std::optional<ModeSummary> encrypted;
  ResourcePreset resources;
  std::vector<LatencySample> samples;
};

/// Recomputes the report from raw samples; gaps are re-drawn from the seed.
BenchReport build_report(std::vector<LatencySample> samples, const Preset& preset, std::uint64_t seed);

enum class ReportFormat { Markdown, Csv };

/// "md" or "csv". Throws ConfigError.
ReportFormat parse_report_format(std::string_view name);

/// Three tables: latency, resources, reliability. Both formats carry the same
/// headers and identically formatted numbers.
std::string render_report(const BenchReport& report, ReportFormat format);

}  // namespace bench
}  // namespace medsec
