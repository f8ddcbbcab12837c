//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "molforge/exsmiles.hpp"

namespace molforge {

namespace {

using OrderMatrix = std::vector<std::vector<int>>;

std::size_t distinct(const std::vector<int> &x, const std::vector<int> &y) {
  std::set<int> all(x.begin(), x.end());
  all.insert(y.begin(), y.end());
  return all.size();
}

OrderMatrix order_matrix(const MoleculeGraph &g) {
  OrderMatrix m(g.atom_count(), std::vector<int>(g.atom_count(), 0));
  for (const auto &b : g.bonds()) {
    m[static_cast<std::size_t>(b.a)][static_cast<std::size_t>(b.b)] = b.order;
    m[static_cast<std::size_t>(b.b)][static_cast<std::size_t>(b.a)] = b.order;
  }
  return m;
}

// Colour refinement over both graphs with a shared palette so colours are
// comparable across them.
std::pair<std::vector<int>, std::vector<int>>
refine(const MoleculeGraph &a, const OrderMatrix &ma, const MoleculeGraph &b,
       const OrderMatrix &mb) {
  std::map<std::tuple<std::string, int, int>, int> initial;
  auto seed = [&](const MoleculeGraph &g) {
    std::vector<int> colour(g.atom_count());
    for (std::size_t i = 0; i < g.atom_count(); ++i) {
      const auto &at = g.atoms()[i];
      auto key = std::make_tuple(at.element, at.h_count, g.degree(static_cast<int>(i)));
      colour[i] = initial.emplace(key, static_cast<int>(initial.size())).first->second;
    }
    return colour;
  };
  std::vector<int> ca = seed(a), cb = seed(b);

  for (std::size_t round = 0; round < a.atom_count(); ++round) {
    std::map<std::pair<int, std::vector<std::pair<int, int>>>, int> palette;
    auto step = [&](const std::vector<int> &colour, const OrderMatrix &m) {
      std::vector<int> next(colour.size());
      for (std::size_t i = 0; i < colour.size(); ++i) {
        std::vector<std::pair<int, int>> around;
        for (std::size_t j = 0; j < colour.size(); ++j)
          if (m[i][j])
            around.emplace_back(colour[j], m[i][j]);
        std::sort(around.begin(), around.end());
        auto key = std::make_pair(colour[i], std::move(around));
        next[i] = palette.emplace(std::move(key), static_cast<int>(palette.size()))
                      .first->second;
      }
      return next;
    };
    auto na = step(ca, ma), nb = step(cb, mb);
    // Refinement only splits classes; an unchanged class count is a fixpoint.
    const bool stable = distinct(na, nb) == distinct(ca, cb);
    ca = std::move(na);
    cb = std::move(nb);
    if (stable)
      break;
  }
  return {ca, cb};
}

class Matcher {
public:
  Matcher(const OrderMatrix &ma, const OrderMatrix &mb, std::vector<int> ca,
          std::vector<int> cb)
      : ma_(ma), mb_(mb), ca_(std::move(ca)), cb_(std::move(cb)),
        map_(ca_.size(), -1), used_(ca_.size(), 0) {
    // Visit atoms so each one (after the first of its component) has a
    // mapped neighbour, which prunes candidates early.
    std::vector<char> placed(ca_.size(), 0);
    for (std::size_t s = 0; s < ca_.size(); ++s) {
      if (placed[s])
        continue;
      std::vector<std::size_t> frontier{s};
      placed[s] = 1;
      for (std::size_t k = 0; k < frontier.size(); ++k) {
        const std::size_t u = frontier[k];
        order_.push_back(u);
        for (std::size_t v = 0; v < ca_.size(); ++v)
          if (ma_[u][v] && !placed[v]) {
            placed[v] = 1;
            frontier.push_back(v);
          }
      }
    }
  }

  bool solve(std::size_t depth = 0) {
    if (depth == order_.size())
      return true;
    const std::size_t u = order_[depth];
    for (std::size_t cand = 0; cand < cb_.size(); ++cand) {
      if (used_[cand] || cb_[cand] != ca_[u] || !consistent(u, cand))
        continue;
      map_[u] = static_cast<int>(cand);
      used_[cand] = 1;
      if (solve(depth + 1))
        return true;
      map_[u] = -1;
      used_[cand] = 0;
    }
    return false;
  }

private:
  bool consistent(std::size_t u, std::size_t cand) const {
    for (std::size_t w = 0; w < map_.size(); ++w) {
      if (map_[w] < 0)
        continue;
      if (ma_[u][w] != mb_[cand][static_cast<std::size_t>(map_[w])])
        return false;
    }
    return true;
  }

  const OrderMatrix &ma_;
  const OrderMatrix &mb_;
  std::vector<int> ca_, cb_;
  std::vector<int> map_;
  std::vector<char> used_;
  std::vector<std::size_t> order_;
};

} // namespace

bool isomorphic(const MoleculeGraph &a, const MoleculeGraph &b) {
  if (a.atom_count() != b.atom_count() || a.bond_count() != b.bond_count())
    return false;
  if (a.empty())
    return true;
  const OrderMatrix ma = order_matrix(a), mb = order_matrix(b);
  auto [ca, cb] = refine(a, ma, b, mb);
  auto sa = ca, sb = cb;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb)
    return false;
  return Matcher(ma, mb, std::move(ca), std::move(cb)).solve();
}

} // namespace molforge
