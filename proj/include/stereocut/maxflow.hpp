#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

namespace stereocut {

// Max-flow / min-cut on a graph with terminal arcs, using the Boykov-Kolmogorov
// search-tree algorithm: two trees (source and sink) grow until they touch,
// flow is pushed along the found path, and the orphans created by saturated
// arcs are re-adopted or freed. Trees are reused across augmentations.
//
// After maxflow(), in_source_set(i) reports membership in the minimal source
// side of a minimum cut, i.e. the nodes reachable from the source through
// arcs with positive residual capacity.
template <typename Cap = double>
class MaxFlowGraph {
 public:
  using NodeId = std::int32_t;

  explicit MaxFlowGraph(std::size_t node_hint = 0, std::size_t edge_hint = 0) {
    nodes_.reserve(node_hint);
    arcs_.reserve(2 * edge_hint);
  }

  NodeId add_node() {
    nodes_.push_back(Node{});
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  void add_nodes(std::size_t n) { nodes_.resize(nodes_.size() + n); }

  std::size_t node_count() const noexcept { return nodes_.size(); }

  // Adds capacities source->i and i->sink.
  void add_tweights(NodeId i, Cap to_source, Cap to_sink) {
    Node& n = nodes_[i];
    if (n.tr_cap > 0) {
      to_source += n.tr_cap;
    } else {
      to_sink -= n.tr_cap;
    }
    flow_ += to_source < to_sink ? to_source : to_sink;
    n.tr_cap = to_source - to_sink;
  }

  // Adds arcs i->j with capacity `cap` and j->i with capacity `rev_cap`.
  void add_edge(NodeId i, NodeId j, Cap cap, Cap rev_cap) {
    const auto a = static_cast<ArcId>(arcs_.size());
    arcs_.push_back(Arc{j, nodes_[i].first, cap});
    nodes_[i].first = a;
    arcs_.push_back(Arc{i, nodes_[j].first, rev_cap});
    nodes_[j].first = a + 1;
  }

  Cap maxflow() {
    init();
    NodeId current = kNone;
    while (true) {
      NodeId i = current;
      if (i != kNone) {
        nodes_[i].next = kNone;
        if (nodes_[i].parent == kNoParent) i = kNone;
      }
      if (i == kNone) {
        i = next_active();
        if (i == kNone) break;
      }

      ArcId meeting = kNoArc;
      Node& n = nodes_[i];
      if (!n.is_sink) {
        for (ArcId a = n.first; a != kNoArc; a = arcs_[a].next) {
          if (arcs_[a].r_cap == 0) continue;
          const NodeId j = arcs_[a].head;
          Node& m = nodes_[j];
          if (m.parent == kNoParent) {
            m.is_sink = false;
            m.parent = sister(a);
            m.ts = n.ts;
            m.dist = n.dist + 1;
            set_active(j);
          } else if (m.is_sink) {
            meeting = a;
            break;
          } else if (m.ts <= n.ts && m.dist > n.dist) {
            m.parent = sister(a);
            m.ts = n.ts;
            m.dist = n.dist + 1;
          }
        }
      } else {
        for (ArcId a = n.first; a != kNoArc; a = arcs_[a].next) {
          if (arcs_[sister(a)].r_cap == 0) continue;
          const NodeId j = arcs_[a].head;
          Node& m = nodes_[j];
          if (m.parent == kNoParent) {
            m.is_sink = true;
            m.parent = sister(a);
            m.ts = n.ts;
            m.dist = n.dist + 1;
            set_active(j);
          } else if (!m.is_sink) {
            meeting = sister(a);
            break;
          } else if (m.ts <= n.ts && m.dist > n.dist) {
            m.parent = sister(a);
            m.ts = n.ts;
            m.dist = n.dist + 1;
          }
        }
      }

      ++time_;
      if (meeting != kNoArc) {
        nodes_[i].next = i;  // keep i marked active while it is being processed
        current = i;
        augment(meeting);
        while (!orphans_.empty()) {
          const NodeId o = orphans_.front();
          orphans_.pop_front();
          if (nodes_[o].is_sink) {
            process_sink_orphan(o);
          } else {
            process_source_orphan(o);
          }
        }
      } else {
        current = kNone;
      }
    }
    compute_source_set();
    return flow_;
  }

  Cap flow() const noexcept { return flow_; }

  bool in_source_set(NodeId i) const noexcept { return source_set_[i] != 0; }

 private:
  using ArcId = std::int32_t;
  static constexpr NodeId kNone = -1;
  static constexpr ArcId kNoArc = -1;
  // parent markers
  static constexpr ArcId kNoParent = -1;
  static constexpr ArcId kTerminal = -2;
  static constexpr ArcId kOrphan = -3;
  static constexpr int kInfiniteDist = std::numeric_limits<int>::max();

  struct Arc {
    NodeId head = kNone;
    ArcId next = kNoArc;  // next arc leaving the same tail
    Cap r_cap = 0;
  };

  struct Node {
    ArcId first = kNoArc;
    ArcId parent = kNoParent;
    NodeId next = kNone;  // active list; self-loop marks the last element
    long ts = 0;
    int dist = 0;
    bool is_sink = false;
    Cap tr_cap = 0;  // > 0: residual from source, < 0: residual to sink
  };

  static ArcId sister(ArcId a) noexcept { return a ^ 1; }

  void set_active(NodeId i) {
    if (nodes_[i].next != kNone) return;
    if (queue_last_[1] != kNone) {
      nodes_[queue_last_[1]].next = i;
    } else {
      queue_first_[1] = i;
    }
    queue_last_[1] = i;
    nodes_[i].next = i;
  }

  NodeId next_active() {
    while (true) {
      NodeId i = queue_first_[0];
      if (i == kNone) {
        queue_first_[0] = i = queue_first_[1];
        queue_last_[0] = queue_last_[1];
        queue_first_[1] = queue_last_[1] = kNone;
        if (i == kNone) return kNone;
      }
      if (nodes_[i].next == i) {
        queue_first_[0] = queue_last_[0] = kNone;
      } else {
        queue_first_[0] = nodes_[i].next;
      }
      nodes_[i].next = kNone;
      if (nodes_[i].parent != kNoParent) return i;
    }
  }

  void init() {
    queue_first_[0] = queue_first_[1] = queue_last_[0] = queue_last_[1] = kNone;
    orphans_.clear();
    time_ = 0;
    for (NodeId i = 0; i < static_cast<NodeId>(nodes_.size()); ++i) {
      Node& n = nodes_[i];
      n.next = kNone;
      n.ts = time_;
      if (n.tr_cap > 0) {
        n.is_sink = false;
        n.parent = kTerminal;
        set_active(i);
        n.dist = 1;
      } else if (n.tr_cap < 0) {
        n.is_sink = true;
        n.parent = kTerminal;
        set_active(i);
        n.dist = 1;
      } else {
        n.parent = kNoParent;
      }
    }
  }

  void make_orphan_front(NodeId i) {
    nodes_[i].parent = kOrphan;
    orphans_.push_front(i);
  }
  void make_orphan_back(NodeId i) {
    nodes_[i].parent = kOrphan;
    orphans_.push_back(i);
  }

  // `middle` runs from a source-tree node to a sink-tree node.
  void augment(ArcId middle) {
    Cap bottleneck = arcs_[middle].r_cap;
    NodeId i = arcs_[sister(middle)].head;
    for (;;) {
      const ArcId a = nodes_[i].parent;
      if (a == kTerminal) break;
      if (bottleneck > arcs_[sister(a)].r_cap) bottleneck = arcs_[sister(a)].r_cap;
      i = arcs_[a].head;
    }
    if (bottleneck > nodes_[i].tr_cap) bottleneck = nodes_[i].tr_cap;
    i = arcs_[middle].head;
    for (;;) {
      const ArcId a = nodes_[i].parent;
      if (a == kTerminal) break;
      if (bottleneck > arcs_[a].r_cap) bottleneck = arcs_[a].r_cap;
      i = arcs_[a].head;
    }
    if (bottleneck > -nodes_[i].tr_cap) bottleneck = -nodes_[i].tr_cap;

    arcs_[sister(middle)].r_cap += bottleneck;
    arcs_[middle].r_cap -= bottleneck;

    i = arcs_[sister(middle)].head;
    for (;;) {
      const ArcId a = nodes_[i].parent;
      if (a == kTerminal) break;
      arcs_[a].r_cap += bottleneck;
      arcs_[sister(a)].r_cap -= bottleneck;
      if (arcs_[sister(a)].r_cap == 0) make_orphan_front(i);
      i = arcs_[a].head;
    }
    nodes_[i].tr_cap -= bottleneck;
    if (nodes_[i].tr_cap == 0) make_orphan_front(i);

    i = arcs_[middle].head;
    for (;;) {
      const ArcId a = nodes_[i].parent;
      if (a == kTerminal) break;
      arcs_[sister(a)].r_cap += bottleneck;
      arcs_[a].r_cap -= bottleneck;
      if (arcs_[a].r_cap == 0) make_orphan_front(i);
      i = arcs_[a].head;
    }
    nodes_[i].tr_cap += bottleneck;
    if (nodes_[i].tr_cap == 0) make_orphan_front(i);

    flow_ += bottleneck;
  }

  // Distance from j to its tree's terminal through valid parents, or
  // kInfiniteDist if the path hits an orphan. Marks the path with time_.
  int origin_distance(NodeId j) {
    int d = 0;
    for (;;) {
      Node& m = nodes_[j];
      if (m.ts == time_) {
        d += m.dist;
        break;
      }
      const ArcId a = m.parent;
      ++d;
      if (a == kTerminal) {
        m.ts = time_;
        m.dist = 1;
        break;
      }
      if (a == kOrphan) return kInfiniteDist;
      j = arcs_[a].head;
    }
    return d;
  }

  void mark_path(NodeId j, int d) {
    for (; nodes_[j].ts != time_; j = arcs_[nodes_[j].parent].head) {
      nodes_[j].ts = time_;
      nodes_[j].dist = d--;
    }
  }

  void process_source_orphan(NodeId i) {
    ArcId best = kNoArc;
    int d_min = kInfiniteDist;
    for (ArcId a0 = nodes_[i].first; a0 != kNoArc; a0 = arcs_[a0].next) {
      if (arcs_[sister(a0)].r_cap == 0) continue;
      const NodeId j = arcs_[a0].head;
      if (nodes_[j].is_sink || nodes_[j].parent == kNoParent) continue;
      const int d = origin_distance(j);
      if (d == kInfiniteDist) continue;
      if (d < d_min) {
        best = a0;
        d_min = d;
      }
      mark_path(j, d);
    }
    nodes_[i].parent = best;
    if (best != kNoArc) {
      nodes_[i].ts = time_;
      nodes_[i].dist = d_min + 1;
      return;
    }
    nodes_[i].parent = kNoParent;
    for (ArcId a0 = nodes_[i].first; a0 != kNoArc; a0 = arcs_[a0].next) {
      const NodeId j = arcs_[a0].head;
      const ArcId a = nodes_[j].parent;
      if (nodes_[j].is_sink || a == kNoParent) continue;
      if (arcs_[sister(a0)].r_cap != 0) set_active(j);
      if (a != kTerminal && a != kOrphan && arcs_[a].head == i) make_orphan_back(j);
    }
  }

  void process_sink_orphan(NodeId i) {
    ArcId best = kNoArc;
    int d_min = kInfiniteDist;
    for (ArcId a0 = nodes_[i].first; a0 != kNoArc; a0 = arcs_[a0].next) {
      if (arcs_[a0].r_cap == 0) continue;
      const NodeId j = arcs_[a0].head;
      if (!nodes_[j].is_sink || nodes_[j].parent == kNoParent) continue;
      const int d = origin_distance(j);
      if (d == kInfiniteDist) continue;
      if (d < d_min) {
        best = a0;
        d_min = d;
      }
      mark_path(j, d);
    }
    nodes_[i].parent = best;
    if (best != kNoArc) {
      nodes_[i].ts = time_;
      nodes_[i].dist = d_min + 1;
      return;
    }
    nodes_[i].parent = kNoParent;
    for (ArcId a0 = nodes_[i].first; a0 != kNoArc; a0 = arcs_[a0].next) {
      const NodeId j = arcs_[a0].head;
      const ArcId a = nodes_[j].parent;
      if (!nodes_[j].is_sink || a == kNoParent) continue;
      if (arcs_[a0].r_cap != 0) set_active(j);
      if (a != kTerminal && a != kOrphan && arcs_[a].head == i) make_orphan_back(j);
    }
  }

  void compute_source_set() {
    source_set_.assign(nodes_.size(), 0);
    std::vector<NodeId> stack;
    for (NodeId i = 0; i < static_cast<NodeId>(nodes_.size()); ++i) {
      if (nodes_[i].tr_cap > 0) {
        source_set_[i] = 1;
        stack.push_back(i);
      }
    }
    while (!stack.empty()) {
      const NodeId i = stack.back();
      stack.pop_back();
      for (ArcId a = nodes_[i].first; a != kNoArc; a = arcs_[a].next) {
        const NodeId j = arcs_[a].head;
        if (arcs_[a].r_cap > 0 && !source_set_[j]) {
          source_set_[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::deque<NodeId> orphans_;
  NodeId queue_first_[2] = {kNone, kNone};
  NodeId queue_last_[2] = {kNone, kNone};
  long time_ = 0;
  Cap flow_ = 0;
  std::vector<std::uint8_t> source_set_;
};

}  // namespace stereocut
