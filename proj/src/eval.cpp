#include "graphann/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "graphann/parallel.hpp"

namespace graphann {

double recall_k_at_n(std::span<const uint32_t> truth_ids, std::span<const float> truth_dists,
                     std::span<const uint32_t> result, uint32_t k) {
  if (k == 0) throw std::invalid_argument("recall: k must be positive");
  if (truth_ids.size() < k || truth_dists.size() != truth_ids.size()) {
    throw std::invalid_argument("recall: ground truth depth below k");
  }

  const float kth = truth_dists[k - 1];
  uint32_t matched = 0;
  for (uint32_t id : result) {
    bool hit = false;
    for (uint32_t j = 0; j < k && !hit; ++j) hit = truth_ids[j] == id;
    // Truth is sorted, so ties with the k-th distance sit right after k-1.
    for (size_t j = k; j < truth_ids.size() && !hit && truth_dists[j] == kth; ++j) {
      hit = truth_ids[j] == id;
    }
    if (hit) ++matched;
  }
  return static_cast<double>(std::min(matched, k)) / k;
}

std::optional<double> range_recall(const RangeGroundTruth& truth,
                                   std::span<const std::vector<uint32_t>> results) {
  if (results.size() != truth.queries()) {
    throw std::invalid_argument("range recall: result/query count mismatch");
  }
  double sum = 0.0;
  uint32_t scored = 0;
  for (uint32_t q = 0; q < truth.queries(); ++q) {
    const uint32_t cnt = truth.count(q);
    if (cnt == 0) continue;
    const uint32_t* ids = truth.ids.data() + truth.offsets[q];
    uint32_t hits = 0;
    for (uint32_t id : results[q]) {
      if (std::find(ids, ids + cnt, id) != ids + cnt) ++hits;
    }
    sum += static_cast<double>(hits) / cnt;
    ++scored;
  }
  if (scored == 0) return std::nullopt;
  return sum / scored;
}

QpsResult measure_qps(const QueryFn& search, uint32_t n_queries, size_t threads,
                      uint32_t repetitions, std::vector<std::vector<uint32_t>>* first_rep_out) {
  if (n_queries == 0) throw std::invalid_argument("qps: need at least one query");
  if (repetitions == 0) throw std::invalid_argument("qps: need at least one repetition");

  const size_t w = resolve_workers(threads);
  if (first_rep_out) first_rep_out->assign(n_queries, {});

  double best_qps = 0.0;
  uint64_t total_comps = 0, total_lat_ns = 0;
  using clock = std::chrono::steady_clock;

  for (uint32_t rep = 0; rep < repetitions; ++rep) {
    std::vector<uint64_t> comps(w, 0), lat_ns(w, 0);
    auto wall0 = clock::now();
    parallel_for(n_queries, threads, [&](size_t q, size_t worker) {
      auto t0 = clock::now();
      SearchResult r = search(static_cast<uint32_t>(q));
      auto t1 = clock::now();
      comps[worker] += r.dist_comps;
      lat_ns[worker] +=
          static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
      if (rep == 0 && first_rep_out) {
        auto& out = (*first_rep_out)[q];
        out.reserve(r.neighbors.size());
        for (const Neighbor& nb : r.neighbors) out.push_back(nb.id);
      }
    });
    auto wall1 = clock::now();
    double secs = std::chrono::duration<double>(wall1 - wall0).count();
    if (secs <= 0) secs = 1e-9;
    best_qps = std::max(best_qps, n_queries / secs);
    for (size_t i = 0; i < w; ++i) {
      total_comps += comps[i];
      total_lat_ns += lat_ns[i];
    }
  }

  const double executed = static_cast<double>(n_queries) * repetitions;
  QpsResult out;
  out.qps = best_qps;
  out.latency_ms = total_lat_ns / executed / 1e6;
  out.dist_comps = total_comps / executed;
  return out;
}

namespace {

void validate_sweep(const SweepConfig& sweep, bool range_mode) {
  if (sweep.beams.empty() || sweep.epsilons.empty() || (!range_mode && sweep.ks.empty())) {
    throw std::invalid_argument("sweep: parameter lists must be nonempty");
  }
  for (float e : sweep.epsilons) {
    if (e < 0.0f || e > 0.25f) throw std::invalid_argument("sweep: epsilon outside [0, 0.25]");
  }
  if (sweep.repetitions == 0) throw std::invalid_argument("sweep: repetitions must be positive");
}

void sort_rows(std::vector<EvalRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const EvalRow& a, const EvalRow& b) {
    if (a.recall != b.recall) return a.recall < b.recall;
    if (a.qps != b.qps) return a.qps < b.qps;
    if (a.beam != b.beam) return a.beam < b.beam;
    if (a.k != b.k) return a.k < b.k;
    return a.epsilon < b.epsilon;
  });
}

}  // namespace

EvalReport run_sweep(const SearchDispatch& search, const VectorDataset& queries,
                     const GroundTruth& truth, const SweepConfig& sweep, const EvalMeta& meta) {
  validate_sweep(sweep, false);
  if (truth.queries() != queries.size()) {
    throw std::invalid_argument("sweep: ground truth query count mismatch");
  }
  for (uint32_t k : sweep.ks) {
    if (k == 0 || k > truth.k) throw std::invalid_argument("sweep: ground truth depth below k");
  }

  EvalReport report;
  report.meta = meta;
  report.meta.threads = resolve_workers(sweep.threads);

  std::vector<std::vector<uint32_t>> results;
  for (uint32_t beam : sweep.beams) {
    for (uint32_t k : sweep.ks) {
      if (k > beam) {
        std::cerr << "note: skipping sweep point beam=" << beam << " k=" << k
                  << " (k exceeds beam)\n";
        continue;
      }
      for (float eps : sweep.epsilons) {
        SearchParams params{beam, k, eps};
        QpsResult q = measure_qps(
            [&](uint32_t qi) { return search(qi, params); }, queries.size(), sweep.threads,
            sweep.repetitions, &results);

        double recall_sum = 0.0;
        for (uint32_t qi = 0; qi < queries.size(); ++qi) {
          recall_sum += recall_k_at_n({truth.ids_row(qi), truth.k}, {truth.dists_row(qi), truth.k},
                                      results[qi], k);
        }
        report.rows.push_back({beam, k, eps, recall_sum / queries.size(), q.qps, q.latency_ms,
                               q.dist_comps});
      }
    }
  }
  sort_rows(report.rows);
  return report;
}

EvalReport run_range_sweep(const RangeDispatch& search, const VectorDataset& queries,
                           const RangeGroundTruth& truth, const SweepConfig& sweep,
                           const EvalMeta& meta) {
  validate_sweep(sweep, true);
  if (truth.queries() != queries.size()) {
    throw std::invalid_argument("sweep: ground truth query count mismatch");
  }
  bool any = false;
  for (uint32_t q = 0; q < truth.queries() && !any; ++q) any = truth.count(q) > 0;
  if (!any) throw std::invalid_argument("range sweep: no query has in-range ground truth");

  EvalReport report;
  report.meta = meta;
  report.meta.threads = resolve_workers(sweep.threads);

  std::vector<std::vector<uint32_t>> results;
  for (uint32_t beam : sweep.beams) {
    for (float eps : sweep.epsilons) {
      SearchParams params{beam, beam, eps};
      QpsResult q = measure_qps(
          [&](uint32_t qi) {
            RangeResult r = search(qi, params);
            SearchResult as_search;
            as_search.neighbors = std::move(r.in_range);
            as_search.dist_comps = r.dist_comps;
            return as_search;
          },
          queries.size(), sweep.threads, sweep.repetitions, &results);

      double recall = range_recall(truth, results).value();
      report.rows.push_back({beam, 0, eps, recall, q.qps, q.latency_ms, q.dist_comps});
    }
  }
  sort_rows(report.rows);
  return report;
}

std::vector<EvalRow> pareto_frontier(std::span<const EvalRow> rows) {
  std::vector<EvalRow> sorted(rows.begin(), rows.end());
  std::sort(sorted.begin(), sorted.end(), [](const EvalRow& a, const EvalRow& b) {
    if (a.recall != b.recall) return a.recall > b.recall;
    if (a.qps != b.qps) return a.qps > b.qps;
    if (a.beam != b.beam) return a.beam < b.beam;
    if (a.k != b.k) return a.k < b.k;
    return a.epsilon < b.epsilon;
  });

  std::vector<EvalRow> keep;
  double best_qps = -1.0;
  for (const EvalRow& row : sorted) {
    if (row.qps > best_qps) {
      keep.push_back(row);
      best_qps = row.qps;
    }
  }
  std::reverse(keep.begin(), keep.end());  // recall ascending
  return keep;
}

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void write_csv(const EvalReport& report, std::ostream& out) {
  out << "# threads=" << report.meta.threads << "\n";
  out << "algorithm,dataset,n,build_seconds,beam,k,epsilon,recall,qps,latency_ms,dist_comps\n";
  for (const EvalRow& r : report.rows) {
    out << report.meta.algorithm << ',' << report.meta.dataset << ',' << report.meta.n << ','
        << fmt_num(report.meta.build_seconds) << ',' << r.beam << ',' << r.k << ','
        << fmt_num(r.epsilon) << ',' << fmt_num(r.recall) << ',' << fmt_num(r.qps) << ','
        << fmt_num(r.latency_ms) << ',' << fmt_num(r.dist_comps) << "\n";
  }
}

void write_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  write_csv(report, out);
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace graphann
