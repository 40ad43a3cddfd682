#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphann/dataset.hpp"
#include "graphann/search.hpp"

namespace graphann {

// Fraction of the true top-k found, out of k. A returned id outside the top-k
// still counts when its stored distance equals the k-th truth distance; the
// id-set definition is ambiguous under ties and this is the usual benchmark
// convention. Order of `result` is irrelevant.
double recall_k_at_n(std::span<const uint32_t> truth_ids, std::span<const float> truth_dists,
                     std::span<const uint32_t> result, uint32_t k);

// Mean over queries with nonempty truth of the fraction of true in-range ids
// returned. Queries with empty truth are excluded entirely; nullopt when no
// query has a nonempty truth set.
std::optional<double> range_recall(const RangeGroundTruth& truth,
                                   std::span<const std::vector<uint32_t>> results);

struct SweepConfig {
  std::vector<uint32_t> beams;
  std::vector<uint32_t> ks;
  std::vector<float> epsilons;
  size_t threads = 0;  // 0 = hardware
  uint32_t repetitions = 1;
};

struct EvalMeta {
  std::string algorithm;
  std::string dataset;
  uint32_t n = 0;
  double build_seconds = 0.0;
  size_t threads = 1;
};

struct EvalRow {
  uint32_t beam = 0;
  uint32_t k = 0;  // 0 in range mode
  float epsilon = 0.0f;
  double recall = 0.0;
  double qps = 0.0;
  double latency_ms = 0.0;
  double dist_comps = 0.0;
};

struct EvalReport {
  EvalMeta meta;
  std::vector<EvalRow> rows;
};

struct QpsResult {
  double qps = 0.0;         // best repetition
  double latency_ms = 0.0;  // mean per-query, all repetitions
  double dist_comps = 0.0;  // mean per query, all repetitions
};

// `search` must be safe to call concurrently. Queries are spread across the
// worker count each repetition; QPS is the best repetition's nq/wall, latency
// and dist_comps are means over every executed query. When `first_rep_out`
// is given it receives each query's result ids from the first repetition.
using QueryFn = std::function<SearchResult(uint32_t query_index)>;
QpsResult measure_qps(const QueryFn& search, uint32_t n_queries, size_t threads,
                      uint32_t repetitions,
                      std::vector<std::vector<uint32_t>>* first_rep_out = nullptr);

// One row per (beam, k, epsilon) with k <= beam (others are skipped with a
// note on stderr); rows come back sorted by recall ascending. `search` runs
// one query at the given params and must be concurrency-safe.
using SearchDispatch = std::function<SearchResult(uint32_t query_index, const SearchParams&)>;
EvalReport run_sweep(const SearchDispatch& search, const VectorDataset& queries,
                     const GroundTruth& truth, const SweepConfig& sweep, const EvalMeta& meta);

// Range-mode sweep: rows per (beam, epsilon), k column 0, recall column holds
// range recall. Throws invalid_argument when no query has in-range truth.
using RangeDispatch = std::function<RangeResult(uint32_t query_index, const SearchParams&)>;
EvalReport run_range_sweep(const RangeDispatch& search, const VectorDataset& queries,
                           const RangeGroundTruth& truth, const SweepConfig& sweep,
                           const EvalMeta& meta);

// Rows not dominated in (recall, QPS), recall ascending; duplicates collapse.
std::vector<EvalRow> pareto_frontier(std::span<const EvalRow> rows);

// Header: algorithm,dataset,n,build_seconds,beam,k,epsilon,recall,qps,
// latency_ms,dist_comps. A "# threads=N" comment line precedes it.
void write_csv(const EvalReport& report, std::ostream& out);
void write_csv(const EvalReport& report, const std::string& path);

}  // namespace graphann
