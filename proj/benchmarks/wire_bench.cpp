#include <benchmark/benchmark.h>

#include "medsec/wire.hpp"

using namespace medsec;

namespace {

const IpAddr4 kServer = IpAddr4::parse("192.168.1.100");

void BM_EncodePlain(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(wire::encode_plain({78, 986}, kServer));
}
BENCHMARK(BM_EncodePlain);

void BM_ParsePlain(benchmark::State& state) {
  const Bytes req = wire::encode_plain({78, 986}, kServer);
  for (auto _ : state) benchmark::DoNotOptimize(wire::parse_plain(req));
}
BENCHMARK(BM_ParsePlain);

void BM_DecodeMessage(benchmark::State& state) {
  const std::string json = wire::encode_message({{78, 986}, "esp8266-01", 1});
  for (auto _ : state) benchmark::DoNotOptimize(wire::decode_message(json));
}
BENCHMARK(BM_DecodeMessage);

}  // namespace
