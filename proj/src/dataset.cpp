#include "graphann/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "graphann/parallel.hpp"

namespace graphann {

namespace {

constexpr uint64_t kMaxBytes = 1ull << 36;  // refuse absurd allocations early

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  return out;
}

void read_exact(std::ifstream& in, void* dst, size_t bytes, const std::string& path) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(bytes));
  if (static_cast<size_t>(in.gcount()) != bytes) {
    throw format_error("truncated file: " + path);
  }
}

uint64_t file_size_of(const std::string& path) {
  std::error_code ec;
  uint64_t size = std::filesystem::file_size(path, ec);
  if (ec) throw io_error("cannot stat: " + path);
  return size;
}

}  // namespace

VectorDataset::VectorDataset(uint32_t n, uint32_t d, ElemKind elem)
    : n_(n), d_(d), elem_(elem), stride_(elem_size(elem) * d) {
  if (d == 0) throw std::invalid_argument("dataset dimension must be positive");
  uint64_t bytes = static_cast<uint64_t>(n) * stride_;
  if (bytes > kMaxBytes) throw std::invalid_argument("dataset too large");
  data_.resize(bytes);
}

FileFormat format_from_path(const std::string& path) {
  if (ends_with(path, "vecs")) return FileFormat::vecs;
  return FileFormat::bin;
}

std::optional<ElemKind> elem_from_path(const std::string& path) {
  if (ends_with(path, ".fvecs") || ends_with(path, ".fbin")) return ElemKind::f32;
  if (ends_with(path, ".bvecs") || ends_with(path, ".u8bin")) return ElemKind::u8;
  if (ends_with(path, ".i8bin")) return ElemKind::i8;
  return std::nullopt;
}

VectorDataset load_vectors(const std::string& path, FileFormat format,
                           std::optional<ElemKind> elem) {
  ElemKind kind = elem ? *elem : elem_from_path(path).value_or(ElemKind::f32);
  const size_t esz = elem_size(kind);
  uint64_t fsize = file_size_of(path);
  auto in = open_in(path);

  if (format == FileFormat::bin) {
    uint32_t header[2];
    read_exact(in, header, sizeof(header), path);
    uint32_t n = header[0], d = header[1];
    if (n == 0 || d == 0) throw format_error("empty dataset (n or d is zero): " + path);
    uint64_t payload = static_cast<uint64_t>(n) * d * esz;
    if (fsize != payload + 8) {
      throw format_error("size mismatch (header says " + std::to_string(n) + "x" +
                         std::to_string(d) + "): " + path);
    }
    VectorDataset ds(n, d, kind);
    read_exact(in, ds.data(), ds.bytes(), path);
    return ds;
  }

  // vecs: every record is 4 bytes of dimension plus the payload.
  uint32_t d = 0;
  read_exact(in, &d, 4, path);
  if (d == 0) throw format_error("zero dimension prefix: " + path);
  uint64_t record = 4 + static_cast<uint64_t>(d) * esz;
  if (fsize % record != 0) throw format_error("truncated or misaligned vecs file: " + path);
  uint64_t n64 = fsize / record;
  if (n64 == 0 || n64 > std::numeric_limits<uint32_t>::max()) {
    throw format_error("bad vector count: " + path);
  }
  uint32_t n = static_cast<uint32_t>(n64);
  VectorDataset ds(n, d, kind);
  read_exact(in, ds.row_ptr(0), d * esz, path);
  for (uint32_t i = 1; i < n; i++) {
    uint32_t di = 0;
    read_exact(in, &di, 4, path);
    if (di != d) {
      throw format_error("inconsistent dimension prefix at vector " + std::to_string(i) +
                         ": " + path);
    }
    read_exact(in, ds.row_ptr(i), d * esz, path);
  }
  return ds;
}

void write_vectors(const VectorDataset& ds, const std::string& path, FileFormat format) {
  if (ds.size() == 0) throw std::invalid_argument("refusing to write an empty dataset");
  auto out = open_out(path);
  if (format == FileFormat::bin) {
    uint32_t header[2] = {ds.size(), ds.dim()};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(ds.data()),
              static_cast<std::streamsize>(ds.bytes()));
  } else {
    uint32_t d = ds.dim();
    for (uint32_t i = 0; i < ds.size(); i++) {
      out.write(reinterpret_cast<const char*>(&d), 4);
      out.write(reinterpret_cast<const char*>(ds.row_ptr(i)),
                static_cast<std::streamsize>(ds.stride()));
    }
  }
  if (!out) throw io_error("write failed: " + path);
}

VectorDataset slice_dataset(const VectorDataset& ds, uint32_t m) {
  if (m == 0 || m > ds.size()) {
    throw std::invalid_argument("slice size " + std::to_string(m) + " out of range (n=" +
                                std::to_string(ds.size()) + ")");
  }
  VectorDataset out(m, ds.dim(), ds.elem());
  std::memcpy(out.data(), ds.data(), static_cast<size_t>(m) * ds.stride());
  return out;
}

VectorDataset gen_gaussian_mixture(uint64_t seed, uint32_t n, uint32_t d, uint32_t clusters) {
  if (n == 0 || d == 0 || clusters == 0) {
    throw std::invalid_argument("gen: n, d and clusters must be positive");
  }
  std::mt19937_64 rng(mix64(seed, 0x6d69787475726573ULL));
  // Center spread close to the cluster width keeps the mixture multimodal but
  // leaves the overlap that graph traversal between modes depends on; far
  // separated unit-variance blobs in moderate dimension make every kNN-style
  // graph fall apart into per-cluster islands.
  std::normal_distribution<float> center_coord(0.0f, 1.0f);
  std::normal_distribution<float> noise(0.0f, 1.0f);
  std::uniform_int_distribution<uint32_t> pick(0, clusters - 1);

  std::vector<float> centers(static_cast<size_t>(clusters) * d);
  for (auto& c : centers) c = center_coord(rng);

  VectorDataset ds(n, d, ElemKind::f32);
  float* out = reinterpret_cast<float*>(ds.data());
  for (uint32_t i = 0; i < n; i++) {
    const float* c = centers.data() + static_cast<size_t>(pick(rng)) * d;
    for (uint32_t j = 0; j < d; j++) out[static_cast<size_t>(i) * d + j] = c[j] + noise(rng);
  }
  return ds;
}

GroundTruth compute_groundtruth(const VectorDataset& ds, const VectorDataset& queries,
                                uint32_t k, Metric metric, size_t workers) {
  if (k == 0) throw std::invalid_argument("groundtruth: k must be positive");
  if (k > ds.size()) {
    throw std::invalid_argument("groundtruth: k=" + std::to_string(k) + " exceeds n=" +
                                std::to_string(ds.size()));
  }
  if (queries.dim() != ds.dim() || queries.elem() != ds.elem()) {
    throw std::invalid_argument("groundtruth: query/base dimension or element kind mismatch");
  }
  const uint32_t nq = queries.size();
  GroundTruth gt;
  gt.k = k;
  gt.ids.resize(static_cast<size_t>(nq) * k);
  gt.dists.resize(static_cast<size_t>(nq) * k);

  BoundMetric bm(metric, ds.elem(), ds.dim());
  parallel_ranges(nq, workers, [&](size_t lo, size_t hi, size_t) {
    DistanceCounter c;
    std::vector<Neighbor> heap;  // max-heap on (dist, id), worst on top
    heap.reserve(k);
    auto worse = neighbor_less;
    for (size_t q = lo; q < hi; q++) {
      heap.clear();
      const std::byte* qp = queries.row_ptr(static_cast<uint32_t>(q));
      for (uint32_t i = 0; i < ds.size(); i++) {
        float dist = bm(qp, ds.row_ptr(i), c);
        Neighbor cand{i, dist};
        if (heap.size() < k) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end(), worse);
        } else if (neighbor_less(cand, heap.front())) {
          std::pop_heap(heap.begin(), heap.end(), worse);
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end(), worse);
        }
      }
      std::sort_heap(heap.begin(), heap.end(), worse);
      for (uint32_t j = 0; j < k; j++) {
        gt.ids[q * k + j] = heap[j].id;
        gt.dists[q * k + j] = heap[j].dist;
      }
    }
  });
  return gt;
}

void save_groundtruth(const GroundTruth& gt, const std::string& path) {
  auto out = open_out(path);
  uint32_t header[2] = {gt.queries(), gt.k};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(gt.ids.data()),
            static_cast<std::streamsize>(gt.ids.size() * 4));
  out.write(reinterpret_cast<const char*>(gt.dists.data()),
            static_cast<std::streamsize>(gt.dists.size() * 4));
  if (!out) throw io_error("write failed: " + path);
}

GroundTruth load_groundtruth(const std::string& path) {
  uint64_t fsize = file_size_of(path);
  auto in = open_in(path);
  uint32_t header[2];
  read_exact(in, header, sizeof(header), path);
  uint32_t nq = header[0], k = header[1];
  if (nq == 0 || k == 0) throw format_error("empty ground truth: " + path);
  uint64_t expect = 8 + static_cast<uint64_t>(nq) * k * 8;
  if (fsize != expect) throw format_error("ground truth size mismatch: " + path);
  GroundTruth gt;
  gt.k = k;
  gt.ids.resize(static_cast<size_t>(nq) * k);
  gt.dists.resize(static_cast<size_t>(nq) * k);
  read_exact(in, gt.ids.data(), gt.ids.size() * 4, path);
  read_exact(in, gt.dists.data(), gt.dists.size() * 4, path);
  return gt;
}

float internal_radius(Metric metric, float r) {
  return metric == Metric::l2_squared ? r * r : r;
}

RangeGroundTruth compute_range_groundtruth(const VectorDataset& ds, const VectorDataset& queries,
                                           float r, Metric metric, size_t workers) {
  if (!(r > 0)) throw std::invalid_argument("range groundtruth: radius must be positive");
  if (queries.dim() != ds.dim() || queries.elem() != ds.elem()) {
    throw std::invalid_argument("range groundtruth: query/base dimension or element kind mismatch");
  }
  const float rr = internal_radius(metric, r);
  const uint32_t nq = queries.size();
  std::vector<std::vector<Neighbor>> rows(nq);

  BoundMetric bm(metric, ds.elem(), ds.dim());
  parallel_for(nq, workers, [&](size_t q, size_t) {
    DistanceCounter c;
    const std::byte* qp = queries.row_ptr(static_cast<uint32_t>(q));
    auto& row = rows[q];
    for (uint32_t i = 0; i < ds.size(); i++) {
      float dist = bm(qp, ds.row_ptr(i), c);
      if (dist <= rr) row.push_back({i, dist});
    }
  });

  RangeGroundTruth gt;
  gt.radius = r;
  gt.offsets.resize(nq + 1);
  gt.offsets[0] = 0;
  for (uint32_t q = 0; q < nq; q++) {
    gt.offsets[q + 1] = gt.offsets[q] + static_cast<uint32_t>(rows[q].size());
  }
  gt.ids.resize(gt.offsets[nq]);
  gt.dists.resize(gt.offsets[nq]);
  for (uint32_t q = 0; q < nq; q++) {
    uint32_t at = gt.offsets[q];
    for (const auto& nb : rows[q]) {
      gt.ids[at] = nb.id;
      gt.dists[at] = nb.dist;
      at++;
    }
  }
  return gt;
}

void save_range_groundtruth(const RangeGroundTruth& gt, const std::string& path) {
  auto out = open_out(path);
  const char magic[4] = {'A', 'N', 'N', 'R'};
  uint32_t version = 1;
  uint32_t nq = gt.queries();
  uint32_t total = gt.offsets.empty() ? 0 : gt.offsets.back();
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&nq), 4);
  out.write(reinterpret_cast<const char*>(&total), 4);
  out.write(reinterpret_cast<const char*>(&gt.radius), 4);
  for (uint32_t q = 0; q < nq; q++) {
    uint32_t cnt = gt.count(q);
    out.write(reinterpret_cast<const char*>(&cnt), 4);
  }
  out.write(reinterpret_cast<const char*>(gt.ids.data()),
            static_cast<std::streamsize>(gt.ids.size() * 4));
  out.write(reinterpret_cast<const char*>(gt.dists.data()),
            static_cast<std::streamsize>(gt.dists.size() * 4));
  if (!out) throw io_error("write failed: " + path);
}

RangeGroundTruth load_range_groundtruth(const std::string& path) {
  uint64_t fsize = file_size_of(path);
  auto in = open_in(path);
  char magic[4];
  read_exact(in, magic, 4, path);
  if (std::memcmp(magic, "ANNR", 4) != 0) {
    throw format_error("not a range ground truth file: " + path);
  }
  uint32_t version, nq, total;
  float radius;
  read_exact(in, &version, 4, path);
  read_exact(in, &nq, 4, path);
  read_exact(in, &total, 4, path);
  read_exact(in, &radius, 4, path);
  if (version != 1) throw format_error("unsupported range ground truth version: " + path);
  uint64_t expect = 20 + static_cast<uint64_t>(nq) * 4 + static_cast<uint64_t>(total) * 8;
  if (fsize != expect) throw format_error("range ground truth size mismatch: " + path);

  RangeGroundTruth gt;
  gt.radius = radius;
  gt.offsets.resize(nq + 1);
  gt.offsets[0] = 0;
  for (uint32_t q = 0; q < nq; q++) {
    uint32_t cnt;
    read_exact(in, &cnt, 4, path);
    gt.offsets[q + 1] = gt.offsets[q] + cnt;
  }
  if (gt.offsets[nq] != total) throw format_error("range ground truth count mismatch: " + path);
  gt.ids.resize(total);
  gt.dists.resize(total);
  read_exact(in, gt.ids.data(), gt.ids.size() * 4, path);
  read_exact(in, gt.dists.data(), gt.dists.size() * 4, path);
  return gt;
}

}  // namespace graphann
