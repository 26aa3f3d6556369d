#include <benchmark/benchmark.h>

#include "ctcsim/analysis.hpp"
#include "ctcsim/scenarios.hpp"

using namespace ctcsim;

namespace {

// A chain of CX gates from one loop qubit through n external qubits.
Circuit fan_out(int externals, int loops) {
  std::vector<Channel> ch;
  std::vector<Gate> gates;
  for (int i = 0; i < loops; ++i) ch.push_back(ctc_channel("c" + std::to_string(i)));
  for (int i = 0; i < externals; ++i) {
    ch.push_back(external_channel("e" + std::to_string(i), PureState::polar("x", 0.4 + i, 0.3)));
    gates.push_back(make_gate(GateKind::CX, {"c" + std::to_string(i % loops), "e" + std::to_string(i)}));
    gates.push_back(make_gate(GateKind::CRot, {"e" + std::to_string(i), "c" + std::to_string(i % loops)}, 0.3));
  }
  return build_circuit(ch, gates);
}

void BM_BellProjections(benchmark::State& s) {
  const auto c = fan_out(static_cast<int>(s.range(0)), static_cast<int>(s.range(1)));
  for (auto _ : s) benchmark::DoNotOptimize(bell_projections(c));
}
BENCHMARK(BM_BellProjections)->Args({2, 1})->Args({6, 1})->Args({6, 2})->Args({8, 3});

void BM_NoisyBell(benchmark::State& s) {
  const auto c = fan_out(static_cast<int>(s.range(0)), 2);
  for (auto _ : s) benchmark::DoNotOptimize(run_noisy_bell(c, 0.2));
}
BENCHMARK(BM_NoisyBell)->Arg(2)->Arg(6);

void BM_Classical(benchmark::State& s) {
  const auto c = fan_out(static_cast<int>(s.range(0)), 2);
  for (auto _ : s) benchmark::DoNotOptimize(run_classical(c, 0.1));
}
BENCHMARK(BM_Classical)->Arg(2)->Arg(6);

void BM_DeltaQuadrature(benchmark::State& s) {
  const auto c = fan_out(3, 1);
  const int n = static_cast<int>(s.range(0));
  for (auto _ : s) benchmark::DoNotOptimize(run_delta_quadrature(c, n, n));
}
BENCHMARK(BM_DeltaQuadrature)->Arg(16)->Arg(64);

void BM_InputBias(benchmark::State& s) {
  const auto c = build_scenario("cnot_gun");
  for (auto _ : s) benchmark::DoNotOptimize(input_bias(c, "psi", Classical{0.2}));
}
BENCHMARK(BM_InputBias);

void BM_CompileUnitary(benchmark::State& s) {
  const auto c = fan_out(static_cast<int>(s.range(0)), 2);
  for (auto _ : s) benchmark::DoNotOptimize(compile_unitary(c));
}
BENCHMARK(BM_CompileUnitary)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
