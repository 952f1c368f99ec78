// Package-level CodeBLEU: OpenMP kernel against the serial reference.

#include <benchmark/benchmark.h>

#include <string>

#include "forge/evaluator/codebleu.hpp"

namespace {

std::string module_source(int index, int functions, bool variant) {
  std::string out = "import os\nimport json\n\n\n";
  for (int f = 0; f < functions; ++f) {
    const std::string name = "handler_" + std::to_string(index) + "_" + std::to_string(f);
    out += "def " + name + "(items, limit=10):\n";
    out += "    total = 0\n";
    out += "    for item in items:\n";
    out += variant ? "        if item > limit:\n            total += item * 2\n"
                   : "        if item >= limit:\n            total = total + item\n";
    out += "    result = {\"name\": \"" + name + "\", \"total\": total}\n";
    out += "    return json.dumps(result)\n\n\n";
  }
  out += "class Store" + std::to_string(index) + ":\n";
  out += "    def __init__(self, path):\n        self.path = os.path.abspath(path)\n\n";
  out += "    def load(self):\n        with open(self.path) as fh:\n            return json.load(fh)\n";
  return out;
}

forge::PackageTree make_tree(int files, bool variant) {
  forge::PackageTree tree;
  for (int i = 0; i < files; ++i) {
    tree.put("pkg/module_" + std::to_string(i) + ".py", module_source(i, 12, variant));
  }
  return tree;
}

void BM_PackageParallel(benchmark::State& state) {
  const auto cand = make_tree(static_cast<int>(state.range(0)), true);
  const auto ref = make_tree(static_cast<int>(state.range(0)), false);
  for (auto _ : state) benchmark::DoNotOptimize(forge::evaluator::codebleu_package(cand, ref));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PackageSerial(benchmark::State& state) {
  const auto cand = make_tree(static_cast<int>(state.range(0)), true);
  const auto ref = make_tree(static_cast<int>(state.range(0)), false);
  for (auto _ : state) benchmark::DoNotOptimize(forge::evaluator::codebleu_package_serial(cand, ref));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_PackageParallel)->RangeMultiplier(4)->Range(4, 64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PackageSerial)->RangeMultiplier(4)->Range(4, 64)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
