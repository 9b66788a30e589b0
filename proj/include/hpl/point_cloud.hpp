#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hpl/random.hpp"

namespace hpl {

// n points in R^d, stored row-major. Immutable once built; vertex order is
// the construction order and is what every index below refers to.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("PointCloud: dim must be >= 1");
  }

  static PointCloud from_flat(int dim, std::vector<double> data) {
    if (dim < 1) throw std::invalid_argument("PointCloud: dim must be >= 1");
    if (data.size() % static_cast<std::size_t>(dim) != 0)
      throw std::invalid_argument("PointCloud: flat data not divisible by dim");
    PointCloud pc(dim);
    pc.data_ = std::move(data);
    return pc;
  }

  int dim() const { return dim_; }
  std::size_t size() const {
    return dim_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(dim_);
  }
  bool empty() const { return data_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {data_.data() + i * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }
  double coord(std::size_t i, int a) const {
    return data_[i * static_cast<std::size_t>(dim_) + a];
  }

  void append(std::span<const double> p) {
    if (static_cast<int>(p.size()) != dim_)
      throw std::invalid_argument("PointCloud: point has wrong dimension");
    data_.insert(data_.end(), p.begin(), p.end());
  }
  void append(std::initializer_list<double> p) {
    append(std::span<const double>(p.begin(), p.size()));
  }

  const std::vector<double>& flat() const { return data_; }

  friend bool operator==(const PointCloud& a, const PointCloud& b) {
    return a.dim_ == b.dim_ && a.data_ == b.data_;
  }

 private:
  int dim_ = 0;
  std::vector<double> data_;
};

inline double squared_distance(const PointCloud& pc, std::size_t i,
                               std::size_t j) {
  const auto a = pc.point(i);
  const auto b = pc.point(j);
  double s = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double d = a[t] - b[t];
    s += d * d;
  }
  return s;
}

// Training set: distinct vertex indices with real target values.
struct LabelConstraints {
  std::vector<std::pair<int, double>> entries;  // sorted by vertex index

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  void add(int index, double value) { entries.emplace_back(index, value); }

  void normalize_and_validate(std::size_t n_vertices) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t t = 0; t < entries.size(); ++t) {
      const int i = entries[t].first;
      if (i < 0 || static_cast<std::size_t>(i) >= n_vertices)
        throw std::invalid_argument("LabelConstraints: index " +
                                    std::to_string(i) + " out of range");
      if (t > 0 && entries[t - 1].first == i)
        throw std::invalid_argument("LabelConstraints: duplicate index " +
                                    std::to_string(i));
    }
  }
};

namespace detail {

inline bool parse_double(std::string_view field, double& out) {
  std::size_t b = 0;
  std::size_t e = field.size();
  while (b < e && (field[b] == ' ' || field[b] == '\t')) ++b;
  while (e > b && (field[e - 1] == ' ' || field[e - 1] == '\t' ||
                   field[e - 1] == '\r'))
    --e;
  if (b == e) return false;
  const char* first = field.data() + b;
  const char* last = field.data() + e;
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

template <class RowFn>
void for_each_csv_row(const std::filesystem::path& path, RowFn&& fn) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open file: " + path.string());
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::string_view sv(line);
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    bool blank = true;
    for (char c : sv)
      if (c != ' ' && c != '\t') blank = false;
    if (blank) continue;
    std::vector<double> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = sv.find(',', start);
      const auto piece = comma == std::string_view::npos
                             ? sv.substr(start)
                             : sv.substr(start, comma - start);
      double v = 0.0;
      if (!parse_double(piece, v))
        throw std::invalid_argument("parse error at row " +
                                    std::to_string(row));
      fields.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    fn(row, fields);
  }
}

}  // namespace detail

// CSV point cloud: one point per row, comma-separated coordinates, no header.
inline PointCloud load_point_cloud(const std::filesystem::path& path) {
  PointCloud pc;
  int dim = 0;
  std::vector<double> data;
  detail::for_each_csv_row(path, [&](std::size_t row,
                                     const std::vector<double>& fields) {
    if (dim == 0) {
      dim = static_cast<int>(fields.size());
    } else if (static_cast<int>(fields.size()) != dim) {
      throw std::invalid_argument("parse error at row " + std::to_string(row) +
                                  ": expected " + std::to_string(dim) +
                                  " columns, got " +
                                  std::to_string(fields.size()));
    }
    data.insert(data.end(), fields.begin(), fields.end());
  });
  if (dim == 0)
    throw std::invalid_argument("empty input: " + path.string());
  return PointCloud::from_flat(dim, std::move(data));
}

// Label CSV: rows "index,value".
inline LabelConstraints load_labels(const std::filesystem::path& path) {
  LabelConstraints lc;
  detail::for_each_csv_row(
      path, [&](std::size_t row, const std::vector<double>& fields) {
        if (fields.size() != 2)
          throw std::invalid_argument("parse error at row " +
                                      std::to_string(row) +
                                      ": expected \"index,value\"");
        lc.add(static_cast<int>(fields[0]), fields[1]);
      });
  if (lc.empty()) throw std::invalid_argument("empty input: " + path.string());
  return lc;
}

// n points drawn from Uniform(0,1). Fixed seed gives a bit-identical cloud.
inline PointCloud sample_uniform_1d(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("empty input: n must be >= 1");
  Rng rng(seed);
  std::vector<double> data(n);
  for (auto& v : data) v = rng.uniform01();
  return PointCloud::from_flat(1, std::move(data));
}

struct LabeledCloud {
  PointCloud cloud;
  std::vector<int> classes;  // true class per point, aligned with vertex order
};

// Isotropic Gaussian blobs, per_cluster points around each center, in cluster
// order. Stand-in data source for classification experiments.
inline LabeledCloud sample_gaussian_clusters(
    const std::vector<std::vector<double>>& centers, double sigma,
    std::size_t per_cluster, std::uint64_t seed) {
  if (centers.empty())
    throw std::invalid_argument("sample_gaussian_clusters: no centers");
  if (!(sigma > 0.0))
    throw std::invalid_argument("sample_gaussian_clusters: sigma must be > 0");
  if (per_cluster == 0)
    throw std::invalid_argument("sample_gaussian_clusters: per_cluster == 0");
  const std::size_t d = centers.front().size();
  for (const auto& c : centers)
    if (c.size() != d)
      throw std::invalid_argument(
          "sample_gaussian_clusters: centers have mixed dimensions");
  Rng rng(seed);
  LabeledCloud out;
  out.cloud = PointCloud(static_cast<int>(d));
  out.classes.reserve(centers.size() * per_cluster);
  std::vector<double> p(d);
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (std::size_t t = 0; t < per_cluster; ++t) {
      for (std::size_t a = 0; a < d; ++a)
        p[a] = centers[c][a] + sigma * rng.gaussian();
      out.cloud.append(std::span<const double>(p));
      out.classes.push_back(static_cast<int>(c));
    }
  }
  return out;
}

}  // namespace hpl
