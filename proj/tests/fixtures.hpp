#pragma once

#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "onn/error.hpp"
#include "onn/graph.hpp"
#include "onn/loss.hpp"

namespace fixtures {

using onn::Edge;
using onn::Index;
using onn::WeightedGraph;

inline WeightedGraph path(Index n, double w = 1.0) {
  std::vector<Edge> e;
  for (Index i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, w});
  return onn::build_graph(n, e);
}

inline WeightedGraph cycle(Index n, double w = 1.0) {
  std::vector<Edge> e;
  for (Index i = 0; i < n; ++i) e.push_back({i, (i + 1) % n, w});
  return onn::build_graph(n, e);
}

inline WeightedGraph star(Index leaves) {
  std::vector<Edge> e;
  for (Index i = 1; i <= leaves; ++i) e.push_back({0, i, 1.0});
  return onn::build_graph(leaves + 1, e);
}

inline WeightedGraph complete(Index n) {
  std::vector<Edge> e;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) e.push_back({i, j, 1.0});
  return onn::build_graph(n, e);
}

inline onn::SemanticState column(std::vector<double> v) {
  onn::StateMatrix m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return onn::SemanticState(m);
}

inline onn::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const onn::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an onn::Error";
  return onn::ErrorCode::InvalidParams;
}

}  // namespace fixtures
