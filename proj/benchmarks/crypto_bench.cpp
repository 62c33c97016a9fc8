#include <benchmark/benchmark.h>

#include "medsec/crypto.hpp"

using namespace medsec;

namespace {

const crypto::Key128 kKey = crypto::Key128::from_hex("2b7e151628aed2a6abf7158809cf4f3c");

void BM_BlockEncrypt(benchmark::State& state) {
  const crypto::Aes128 aes(kKey);
  crypto::Block block{};
  for (auto _ : state) {
    block = aes.encrypt_block(block);
    benchmark::DoNotOptimize(block);
  }
  state.SetBytesProcessed(state.iterations() * 16);
}
BENCHMARK(BM_BlockEncrypt);

void BM_Seal(benchmark::State& state) {
  Rng rng(1);
  Bytes pt(static_cast<std::size_t>(state.range(0)), 'x');
  for (auto _ : state) benchmark::DoNotOptimize(crypto::seal(kKey, pt, rng));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Seal)->Arg(64)->Arg(1024);

void BM_Open(benchmark::State& state) {
  Rng rng(1);
  const Bytes pt(static_cast<std::size_t>(state.range(0)), 'x');
  const crypto::Envelope env = crypto::seal(kKey, pt, rng);
  for (auto _ : state) benchmark::DoNotOptimize(crypto::open(kKey, env));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Open)->Arg(64)->Arg(1024);

}  // namespace
