// Serial vs OpenMP comparisons for the data-parallel kernels: segment
// scoring, per-document segmentation, and the map phase of map-reduce
// summarization.
//
//   cmake --build build --target hldx_bench && ./build/bench/hldx_bench

#include <benchmark/benchmark.h>

#include <random>

#include "hldx/llm.hpp"
#include "hldx/retrieval.hpp"
#include "hldx/segmentation.hpp"
#include "hldx/summarization.hpp"
#include "support/reference.hpp"

using namespace hldx;

namespace {

std::vector<Segment> make_segments(int count, int words_per_segment) {
    std::mt19937 rng(42);
    std::vector<Segment> segments;
    segments.reserve(count);
    for (int i = 0; i < count; ++i) {
        Segment s;
        s.text = ref::random_sentence(rng, words_per_segment);
        s.token_count = count_tokens(s.text);
        s.source_indices = {i};
        s.doc_id = "bench";
        s.position = i;
        segments.push_back(std::move(s));
    }
    return segments;
}

// Burns a deterministic amount of CPU per completion, standing in for
// model latency so the parallel map phase has something to overlap.
class BusyBackend final : public LlmBackend {
public:
    explicit BusyBackend(int rounds) : rounds_(rounds) {}
    CompletionResponse complete(const CompletionRequest& request) override {
        uint64_t h = fnv1a64(request.prompt);
        for (int i = 0; i < rounds_; ++i) h = fnv1a64(std::to_string(h));
        return {"digest " + std::to_string(h), id(), false};
    }
    std::string id() const override { return "busy"; }

private:
    int rounds_;
};

void bench_scoring_serial(benchmark::State& state) {
    auto segments = make_segments(static_cast<int>(state.range(0)), 60);
    for (auto _ : state) {
        auto scores = score_segments("total revenue growth", segments, default_embedder(), 1);
        benchmark::DoNotOptimize(scores);
    }
}

void bench_scoring_openmp(benchmark::State& state) {
    auto segments = make_segments(static_cast<int>(state.range(0)), 60);
    for (auto _ : state) {
        auto scores = score_segments("total revenue growth", segments, default_embedder(), 0);
        benchmark::DoNotOptimize(scores);
    }
}

void bench_scoring_reference(benchmark::State& state) {
    auto segments = make_segments(static_cast<int>(state.range(0)), 60);
    for (auto _ : state) {
        auto ranked = ref::brute_force_rank("total revenue growth", segments, 3);
        benchmark::DoNotOptimize(ranked);
    }
}

void bench_segmentation_serial(benchmark::State& state) {
    std::mt19937 rng(7);
    std::vector<Document> docs;
    for (int i = 0; i < state.range(0); ++i) {
        docs.push_back(ref::random_document(rng, "b" + std::to_string(i)));
    }
    SegmenterConfig cfg;
    cfg.max_tokens_per_segment = 64;
    for (auto _ : state) {
        size_t total = 0;
        for (const auto& doc : docs) {
            total += segment_document(doc, cfg).size();
        }
        benchmark::DoNotOptimize(total);
    }
}

void bench_segmentation_openmp(benchmark::State& state) {
    std::mt19937 rng(7);
    std::vector<Document> docs;
    for (int i = 0; i < state.range(0); ++i) {
        docs.push_back(ref::random_document(rng, "b" + std::to_string(i)));
    }
    SegmenterConfig cfg;
    cfg.max_tokens_per_segment = 64;
    for (auto _ : state) {
        size_t total = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : total)
        for (int i = 0; i < static_cast<int>(docs.size()); ++i) {
            total += segment_document(docs[i], cfg).size();
        }
        benchmark::DoNotOptimize(total);
    }
}

void bench_map_phase(benchmark::State& state) {
    auto segments = make_segments(8, 40);
    BusyBackend backend(2000);
    auto templates = TemplatePack::builtin();
    SummarizeOptions opts;
    opts.parallelism = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto trace = map_reduce_summarize("total revenue", segments, backend, templates, opts);
        benchmark::DoNotOptimize(trace);
    }
}

} // namespace

BENCHMARK(bench_scoring_serial)->Arg(64)->Arg(512)->Arg(4096);
BENCHMARK(bench_scoring_openmp)->Arg(64)->Arg(512)->Arg(4096);
BENCHMARK(bench_scoring_reference)->Arg(64)->Arg(512)->Arg(4096);
BENCHMARK(bench_segmentation_serial)->Arg(16)->Arg(64);
BENCHMARK(bench_segmentation_openmp)->Arg(16)->Arg(64);
BENCHMARK(bench_map_phase)->Arg(1)->Arg(2)->Arg(4);

BENCHMARK_MAIN();
