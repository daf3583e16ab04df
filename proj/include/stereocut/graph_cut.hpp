#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <vector>

#include "bilateral_grid.hpp"
#include "error.hpp"
#include "maxflow.hpp"

namespace stereocut {

struct GraphParams {
  double lambda = 1.0;    // data weight, first window
  double lambda_i = 0.5;  // propagated-mask weight
  double lambda_d = 0.5;  // disparity weight, later windows
  std::array<double, kGridDims> sigma{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  // Swap the data-term charges so label 1 pays the foreground affinity.
  // Kept for comparison only.
  bool literal_eq9 = false;
};

enum class EnergyMode { FirstWindow, Propagated };

struct GraphEdge {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  double weight = 0.0;
};

// Binary energy over grid vertices: cost0/cost1 per node, undirected edges.
// Node order matches the grid's sorted vertex order.
struct EnergyGraph {
  std::vector<PackedKey> nodes;
  std::vector<double> cost0;
  std::vector<double> cost1;
  std::vector<GraphEdge> edges;

  std::size_t size() const noexcept { return nodes.size(); }
};

// Per-node label, 1 = foreground.
using Labeling = std::vector<std::uint8_t>;

struct EnergyBreakdown {
  double data = 0.0;
  double pairwise = 0.0;
  double total = 0.0;
};

inline double gaussian_affinity(const VertexKey& u, const VertexKey& v,
                                const std::array<double, kGridDims>& sigma) {
  double e = 0.0;
  for (int i = 0; i < kGridDims; ++i) {
    const double diff = u[i] - v[i];
    e += diff * diff / (2.0 * sigma[i] * sigma[i]);
  }
  return std::exp(-e);
}

// Terminal costs charge each label the vertex's affinity to the opposite class:
//   first window: cost1 = lambda*A_BG, cost0 = lambda*A_FG
//   propagated:   cost1 = lambda_d*A_BG + lambda_i*M_BG, cost0 = lambda_d*A_FG + lambda_i*M_FG
// Edges join occupied vertices one grid step apart, weight g(u,v)*S(u)*S(v).
inline EnergyGraph build_graph(const SparseGrid& grid, const GraphParams& params,
                               EnergyMode mode) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "grid has no occupied vertex");
  EnergyGraph g;
  const std::size_t n = grid.size();
  g.nodes.resize(n);
  g.cost0.resize(n);
  g.cost1.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const GridVertex& v = grid.vertex(i);
    g.nodes[i] = grid.key(i);
    double fg = v.a_fg, bg = v.a_bg;
    double mfg = v.m_fg, mbg = v.m_bg;
    if (params.literal_eq9) {
      std::swap(fg, bg);
      std::swap(mfg, mbg);
    }
    if (mode == EnergyMode::FirstWindow) {
      g.cost1[i] = params.lambda * bg;
      g.cost0[i] = params.lambda * fg;
    } else {
      g.cost1[i] = params.lambda_d * bg + params.lambda_i * mbg;
      g.cost0[i] = params.lambda_d * fg + params.lambda_i * mfg;
    }
  }
  const auto& dims = grid.params().dims;
  for (std::size_t i = 0; i < n; ++i) {
    const VertexKey u = unpack(grid.key(i));
    for (int a = 0; a < kGridDims; ++a) {
      if (u[a] + 1 > dims[a]) continue;
      VertexKey v = u;
      ++v[a];
      const auto j = grid.index_of(pack(v));
      if (!j) continue;
      const double w = gaussian_affinity(u, v, params.sigma) * grid.vertex(i).s *
                       grid.vertex(*j).s;
      g.edges.push_back({static_cast<std::uint32_t>(i), *j, w});
    }
  }
  return g;
}

inline EnergyBreakdown energy(const EnergyGraph& g, const Labeling& labels) {
  if (labels.size() != g.size()) {
    throw Error(ErrorCode::CountMismatch, "labeling does not cover the graph");
  }
  EnergyBreakdown e;
  for (std::size_t i = 0; i < g.size(); ++i) e.data += labels[i] ? g.cost1[i] : g.cost0[i];
  for (const auto& edge : g.edges) {
    if (labels[edge.a] != labels[edge.b]) e.pairwise += edge.weight;
  }
  e.total = e.data + e.pairwise;
  return e;
}

// Exact minimizer. Foreground = minimal source side of a minimum cut, so a node
// is labeled 1 only if it is 1 in every optimal labeling.
inline Labeling min_cut(const EnergyGraph& g) {
  MaxFlowGraph<double> mf(g.size(), g.edges.size());
  mf.add_nodes(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    mf.add_tweights(static_cast<int>(i), g.cost0[i], g.cost1[i]);
  }
  for (const auto& e : g.edges) {
    mf.add_edge(static_cast<int>(e.a), static_cast<int>(e.b), e.weight, e.weight);
  }
  mf.maxflow();
  Labeling labels(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) labels[i] = mf.in_source_set(static_cast<int>(i));
  return labels;
}

// `node <key> cost0 cost1` lines, then `edge <keyA> <keyB> weight` lines; a key
// is the seven vertex coordinates joined by commas.
inline void dump_graph(const EnergyGraph& g, std::ostream& os) {
  auto key_str = [](PackedKey p) {
    const auto k = unpack(p);
    std::string s;
    for (int a = 0; a < kGridDims; ++a) {
      if (a) s += ',';
      s += std::to_string(k[a]);
    }
    return s;
  };
  const auto old_precision = os.precision(17);
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << "node " << key_str(g.nodes[i]) << ' ' << g.cost0[i] << ' ' << g.cost1[i] << '\n';
  }
  for (const auto& e : g.edges) {
    os << "edge " << key_str(g.nodes[e.a]) << ' ' << key_str(g.nodes[e.b]) << ' ' << e.weight
       << '\n';
  }
  os.precision(old_precision);
}

}  // namespace stereocut
