#include <benchmark/benchmark.h>

#include "cubesettle/settlement.hpp"

namespace {

using namespace cubesettle;

struct Fixture {
  SubscriptionRegistry registry;
  CubeSet cubes;

  Fixture(int n_producers, int n_consumers, int n_topics) {
    Window window(0, 3600);
    cubes.window = window;
    std::set<Topic> topics;
    for (int t = 0; t < n_topics; ++t) topics.insert(Topic{"t" + std::to_string(t)});
    for (int p = 0; p < n_producers; ++p) {
      ParticipantId producer = producer_id("p" + std::to_string(p));
      PublisherCube cube;
      cube.window = window;
      cube.producer = producer;
      for (const auto& topic : topics) cube.entries[topic] = 100 + p;
      cubes.publishers[producer] = std::move(cube);
      for (int c = 0; c < n_consumers; ++c) {
        registry.add(Agreement{producer, consumer_id("c" + std::to_string(c)), topics, window},
                     topics);
      }
    }
    for (int c = 0; c < n_consumers; ++c) {
      ParticipantId consumer = consumer_id("c" + std::to_string(c));
      SubscriberCube cube;
      cube.window = window;
      cube.consumer = consumer;
      for (int p = 0; p < n_producers; ++p) {
        for (const auto& topic : topics) {
          cube.entries[SubscriberKey{producer_id("p" + std::to_string(p)), topic}] = 100 + p;
        }
      }
      cubes.subscribers[consumer] = std::move(cube);
    }
  }
};

void BM_CheckConsistency(benchmark::State& state) {
  Fixture fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_consistency(fixture.cubes, fixture.registry));
  }
}
BENCHMARK(BM_CheckConsistency)->Arg(2)->Arg(5)->Arg(10);

void BM_PropagateMissing(benchmark::State& state) {
  Fixture fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 6);
  for (auto& [producer, cube] : fixture.cubes.publishers) cube.reset();
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate_missing(fixture.cubes, fixture.registry));
  }
}
BENCHMARK(BM_PropagateMissing)->Arg(2)->Arg(5)->Arg(10);

void BM_SettleWindow(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Fixture fixture(n, n, 6);
  PriceTable prices;
  for (int t = 0; t < 6; ++t) prices.set_price(Topic{"t" + std::to_string(t)}, 1000);
  for (auto _ : state) {
    state.PauseTiming();
    Ledger ledger(GasMode::Plain);
    SettlementContext ctx;
    ctx.ledger = &ledger;
    ctx.gas_price = 900'000'000;
    ctx.prices = &prices;
    for (int p = 0; p < n; ++p) {
      ctx.accounts[producer_id("p" + std::to_string(p))] =
          ledger.create_account(producer_id("p" + std::to_string(p)), 1'000'000'000'000'000'000ULL);
    }
    for (int c = 0; c < n; ++c) {
      ctx.accounts[consumer_id("c" + std::to_string(c))] =
          ledger.create_account(consumer_id("c" + std::to_string(c)), 1'000'000'000'000'000'000ULL);
    }
    ctx.deployer = ctx.accounts[consumer_id("c0")];
    state.ResumeTiming();
    benchmark::DoNotOptimize(settle_window(fixture.cubes, fixture.registry, ctx));
  }
}
BENCHMARK(BM_SettleWindow)->Arg(2)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
