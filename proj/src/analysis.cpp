#include "openuas/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "openuas/error.hpp"
#include "random.hpp"

namespace openuas {

namespace {

double squared_distance(const Vec8& a, const Vec8& b) {
  double s = 0.0;
  for (std::size_t h = 0; h < a.size(); ++h) s += (a[h] - b[h]) * (a[h] - b[h]);
  return s;
}

// Nearest centroid; ties go to the lowest index.
int nearest(const Vec8& p, std::span<const Vec8> centroids, double* dist = nullptr) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (dist) *dist = best_d;
  return best;
}

std::vector<Vec8> seed_plusplus(std::span<const Vec8> points, int k, detail::Rng& rng) {
  std::vector<Vec8> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  centroids.push_back(points[static_cast<std::size_t>(detail::uniform_index(rng, points.size()))]);
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = squared_distance(points[i], centroids[0]);
  while (centroids.size() < static_cast<std::size_t>(k)) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick;
    if (total <= 0.0) {
      // Every point coincides with a centroid already; fall back to uniform.
      pick = static_cast<std::size_t>(detail::uniform_index(rng, points.size()));
    } else {
      pick = detail::categorical(rng, d2);
    }
    centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
    }
  }
  return centroids;
}

KMeansResult lloyd(std::span<const Vec8> points, std::vector<Vec8> centroids, const KMeansOptions& options) {
  const std::size_t k = centroids.size();
  KMeansResult r;
  r.labels.assign(points.size(), 0);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    for (std::size_t i = 0; i < points.size(); ++i) r.labels[i] = nearest(points[i], centroids);

    std::vector<Vec8> sums(k, Vec8{});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto c = static_cast<std::size_t>(r.labels[i]);
      ++counts[c];
      for (std::size_t h = 0; h < kEmbeddingDim; ++h) sums[c][h] += points[i][h];
    }
    // An empty cluster takes over the point farthest from its own centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto own = static_cast<std::size_t>(r.labels[i]);
        if (counts[own] <= 1) continue;
        const double d = squared_distance(points[i], centroids[own]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far_d < 0.0) continue;  // no point can be spared
      const auto old = static_cast<std::size_t>(r.labels[far]);
      --counts[old];
      for (std::size_t h = 0; h < kEmbeddingDim; ++h) sums[old][h] -= points[far][h];
      r.labels[far] = static_cast<int>(c);
      counts[c] = 1;
      sums[c] = points[far];
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      Vec8 next{};
      for (std::size_t h = 0; h < kEmbeddingDim; ++h) next[h] = sums[c][h] / static_cast<double>(counts[c]);
      shift = std::max(shift, std::sqrt(squared_distance(next, centroids[c])));
      centroids[c] = next;
    }
    double objective = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      objective += squared_distance(points[i], centroids[static_cast<std::size_t>(r.labels[i])]);
    }
    r.objective_trace.push_back(objective);
    r.iterations = iter + 1;
    if (shift < options.tolerance) break;
  }
  r.centroids = std::move(centroids);
  return r;
}

void canonicalize(KMeansResult& r) {
  const std::size_t k = r.centroids.size();
  std::vector<std::size_t> sizes(k, 0);
  for (int l : r.labels) ++sizes[static_cast<std::size_t>(l)];
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
    if (r.centroids[a] != r.centroids[b]) return r.centroids[a] < r.centroids[b];
    return a < b;
  });
  std::vector<int> relabel(k);
  std::vector<Vec8> centroids(k);
  for (std::size_t n = 0; n < k; ++n) {
    relabel[order[n]] = static_cast<int>(n);
    centroids[n] = r.centroids[order[n]];
  }
  for (int& l : r.labels) l = relabel[static_cast<std::size_t>(l)];
  r.centroids = std::move(centroids);
}

}  // namespace

KMeansResult kmeanspp(std::span<const Vec8> points, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1 || static_cast<std::size_t>(k) > points.size()) {
    throw ConfigError("k = " + std::to_string(k) + " must be in 1.." + std::to_string(points.size()));
  }
  if (options.max_iterations < 1 || options.restarts < 1) throw ConfigError("invalid k-means options");
  detail::Rng rng(detail::derive_seed(seed, 0));
  KMeansResult best;
  for (int run = 0; run < options.restarts; ++run) {
    KMeansResult r = lloyd(points, seed_plusplus(points, k, rng), options);
    if (run == 0 || r.objective() < best.objective()) best = std::move(r);
  }
  canonicalize(best);
  return best;
}

ClusterAssignment kmeanspp_cluster(const EmbeddingTable& table, int k, std::uint64_t seed,
                                   const KMeansOptions& options) {
  std::vector<Vec8> points;
  points.reserve(table.size());
  for (const auto& [id, v] : table) points.push_back(v);
  KMeansResult r = kmeanspp(points, k, seed, options);
  ClusterAssignment a;
  a.k = k;
  std::size_t i = 0;
  for (const auto& [id, v] : table) a.labels.emplace(id, r.labels[i++]);
  a.centroids = std::move(r.centroids);
  a.objective_trace = std::move(r.objective_trace);
  return a;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw ConfigError("labelings differ in length");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    joint[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, c] : joint) index += choose2(c);
  for (const auto& [key, c] : rows) sum_rows += choose2(c);
  for (const auto& [key, c] : cols) sum_cols += choose2(c);
  const double expected = sum_rows * sum_cols / choose2(static_cast<double>(n));
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

ClusterProfile cluster_profile(const ClusterAssignment& assignment, const AreaTable& table, std::string_view prefix) {
  ClusterProfile profile;
  const auto k = static_cast<std::size_t>(assignment.k);
  profile.mean_visits.assign(k, std::array<double, kFineCells>{});
  profile.area_count.assign(k, 0);
  for (const auto& [id, label] : assignment.labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= k) throw ConfigError("cluster label out of range");
    if (id.compare(0, prefix.size(), prefix) != 0) {
      throw NotFoundError("area '" + id + "' does not carry prefix '" + std::string(prefix) + "'");
    }
    const AreaRow* row = table.find(Geocode::parse(std::string_view(id).substr(prefix.size())));
    if (!row) throw NotFoundError("area '" + id + "' not in table");
    auto& cells = profile.mean_visits[static_cast<std::size_t>(label)];
    for (std::size_t c = 0; c < cells.size(); ++c) cells[c] += static_cast<double>(row->fine[c]);
    ++profile.area_count[static_cast<std::size_t>(label)];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (profile.area_count[c] == 0) continue;
    for (double& v : profile.mean_visits[c]) v /= static_cast<double>(profile.area_count[c]);
  }
  return profile;
}

std::vector<Similarity> similar_areas(const EmbeddingTable& table, const std::string& query, double threshold) {
  if (!(threshold >= -1.0 && threshold <= 1.0)) {
    throw ConfigError("similarity threshold must lie in [-1, 1]");
  }
  auto it = table.find(query);
  if (it == table.end()) throw NotFoundError("query area '" + query + "' not in embedding table");
  std::vector<Similarity> out;
  for (const auto& [id, v] : table) {
    if (id == query) continue;
    const double s = cosine_similarity(it->second, v);
    if (s >= threshold) out.push_back(Similarity{id, s});
  }
  std::sort(out.begin(), out.end(), [](const Similarity& a, const Similarity& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.area_id < b.area_id;
  });
  return out;
}

Vec8 resolve_embedding(const EmbeddingTable& table, const Geocode& g) {
  if (auto it = table.find(g.to_string()); it != table.end()) return it->second;
  if (g.level == MeshLevel::M50) {
    if (auto it = table.find(parent_250m(g).to_string()); it != table.end()) return it->second;
  }
  throw NotFoundError("no embedding for " + g.to_string() + " or its 250m parent");
}

}  // namespace openuas
