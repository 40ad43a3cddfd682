#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphann/core.hpp"
#include "graphann/metric.hpp"

namespace graphann {

enum class FileFormat : uint8_t { vecs, bin };

// Dense row-major point set held in one flat buffer.
class VectorDataset {
 public:
  VectorDataset() = default;
  VectorDataset(uint32_t n, uint32_t d, ElemKind elem);

  uint32_t size() const { return n_; }
  uint32_t dim() const { return d_; }
  ElemKind elem() const { return elem_; }
  size_t stride() const { return stride_; }

  const std::byte* row_ptr(uint32_t i) const { return data_.data() + i * stride_; }
  std::byte* row_ptr(uint32_t i) { return data_.data() + i * stride_; }
  VectorView row(uint32_t i) const { return {row_ptr(i), d_, elem_}; }

  const std::byte* data() const { return data_.data(); }
  std::byte* data() { return data_.data(); }
  size_t bytes() const { return data_.size(); }

 private:
  uint32_t n_ = 0;
  uint32_t d_ = 0;
  ElemKind elem_ = ElemKind::f32;
  size_t stride_ = 0;
  std::vector<std::byte> data_;
};

// Layouts, little-endian throughout:
//   vecs: per vector, a u32 dimension prefix then dim values (fvecs f32, bvecs u8).
//   bin:  u32 count, u32 dimension, then count*dim values (fbin/u8bin/i8bin).
// The element kind comes from the extension (.fvecs .bvecs .fbin .u8bin .i8bin)
// unless `elem` overrides it; a bare .bin defaults to f32.
VectorDataset load_vectors(const std::string& path, FileFormat format,
                           std::optional<ElemKind> elem = std::nullopt);
void write_vectors(const VectorDataset& ds, const std::string& path, FileFormat format);

FileFormat format_from_path(const std::string& path);
std::optional<ElemKind> elem_from_path(const std::string& path);

// First m rows.
VectorDataset slice_dataset(const VectorDataset& ds, uint32_t m);

// Unit-variance Gaussian blobs around `clusters` random centers (f32).
// Deterministic in all arguments.
VectorDataset gen_gaussian_mixture(uint64_t seed, uint32_t n, uint32_t d, uint32_t clusters);

// Exact k nearest per query, flattened row-major. Distances are raw metric
// values (squared Euclidean under l2). Ties broken toward the smaller id.
struct GroundTruth {
  uint32_t k = 0;
  std::vector<uint32_t> ids;
  std::vector<float> dists;

  uint32_t queries() const {
    return k == 0 ? 0 : static_cast<uint32_t>(ids.size() / k);
  }
  const uint32_t* ids_row(uint32_t q) const { return ids.data() + static_cast<size_t>(q) * k; }
  const float* dists_row(uint32_t q) const { return dists.data() + static_cast<size_t>(q) * k; }
};

GroundTruth compute_groundtruth(const VectorDataset& ds, const VectorDataset& queries,
                                uint32_t k, Metric metric, size_t workers = 0);

// File layout: u32 query count, u32 k, then all ids (u32), then all distances (f32).
void save_groundtruth(const GroundTruth& gt, const std::string& path);
GroundTruth load_groundtruth(const std::string& path);

// Converts a radius in reported units to the raw comparable form:
// squared under l2, unchanged under ip.
float internal_radius(Metric metric, float r);

// Exact in-range sets per query, CSR-packed. `radius` is in reported units
// (what the user asked for); `dists` are raw metric values, so the membership
// test is dist <= internal_radius(metric, radius).
struct RangeGroundTruth {
  float radius = 0.0f;
  std::vector<uint32_t> offsets;  // queries()+1 entries
  std::vector<uint32_t> ids;
  std::vector<float> dists;

  uint32_t queries() const {
    return offsets.empty() ? 0 : static_cast<uint32_t>(offsets.size() - 1);
  }
  uint32_t count(uint32_t q) const { return offsets[q + 1] - offsets[q]; }
};

// `r` is in reported units (a plain Euclidean radius under l2).
RangeGroundTruth compute_range_groundtruth(const VectorDataset& ds, const VectorDataset& queries,
                                           float r, Metric metric, size_t workers = 0);

// File layout: magic "ANNR", u32 version, u32 query count, u32 total results,
// f32 radius (reported units), then per-query counts (u32), all ids, then all
// distances (raw form).
void save_range_groundtruth(const RangeGroundTruth& gt, const std::string& path);
RangeGroundTruth load_range_groundtruth(const std::string& path);

}  // namespace graphann
