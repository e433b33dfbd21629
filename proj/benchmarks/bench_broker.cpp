#include <benchmark/benchmark.h>

#include "cubesettle/broker.hpp"

namespace {

using namespace cubesettle;

void init_broker(Broker& broker, int n_producers, int n_consumers, int n_topics) {
  std::vector<std::set<Topic>> topic_sets(n_producers);
  for (int p = 0; p < n_producers; ++p) {
    for (int t = 0; t < n_topics; ++t) {
      topic_sets[p].insert(Topic{"t" + std::to_string(t)});
    }
    broker.register_producer(producer_id("p" + std::to_string(p)), topic_sets[p]);
  }
  for (int p = 0; p < n_producers; ++p) {
    for (int c = 0; c < n_consumers; ++c) {
      broker.subscribe(Agreement{producer_id("p" + std::to_string(p)),
                                 consumer_id("c" + std::to_string(c)), topic_sets[p],
                                 Window(0, 1 << 20)});
    }
  }
}

void BM_Publish(benchmark::State& state) {
  Broker broker;
  init_broker(broker, 4, static_cast<int>(state.range(0)), 4);
  Timestamp at = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(broker.publish(producer_id("p0"), Topic{"t0"}, at++ % 1000));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Publish)->Arg(1)->Arg(8)->Arg(32);

void BM_GlobalCube(benchmark::State& state) {
  Broker broker;
  init_broker(broker, 4, 8, 4);
  for (int i = 0; i < state.range(0); ++i) {
    broker.publish(producer_id("p" + std::to_string(i % 4)), Topic{"t" + std::to_string(i % 4)},
                   i % 1000);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(broker.global_cube(Window(0, 1000)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GlobalCube)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
