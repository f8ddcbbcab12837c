//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/exsmiles.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>

#include "molforge/error.hpp"

namespace molforge::exsmiles {

namespace {

constexpr std::uint64_t kNumberCap = 1'000'000;

char bond_symbol(int order) {
  switch (order) {
  case 1: return '-';
  case 2: return '=';
  default: return '#';
  }
}

int bond_order(char c) {
  switch (c) {
  case '-': return 1;
  case '=': return 2;
  case '#': return 3;
  default: return 0;
  }
}

class Parser {
public:
  Parser(const ElementTable &table, std::string_view text)
      : table_(table), text_(text) {}

  MoleculeGraph run() {
    if (text_.empty())
      fail(ParseErrorKind::kEmptyInput, 0, "empty input");

    int current = atom();
    std::vector<int> open_branches;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') {
        open_branches.push_back(current);
        ++pos_;
        if (int next = link(current); next >= 0) {
          current = next;
        } else {
          // A ring marker alone fills the branch.
          expect(')');
          current = open_branches.back();
          open_branches.pop_back();
        }
      } else if (c == ')') {
        if (open_branches.empty())
          fail(ParseErrorKind::kUnexpectedChar, pos_, "unbalanced ')'");
        ++pos_;
        current = open_branches.back();
        open_branches.pop_back();
      } else if (bond_order(c) != 0) {
        if (int next = link(current); next >= 0)
          current = next;
      } else {
        fail(ParseErrorKind::kUnexpectedChar, pos_,
             std::string("unexpected '") + c + "'");
      }
    }
    if (!open_branches.empty())
      fail(ParseErrorKind::kUnexpectedChar, pos_, "unclosed '('");
    if (!open_rings_.empty()) {
      const auto &[number, ring] = *open_rings_.begin();
      fail(ParseErrorKind::kUnmatchedRing, ring.position,
           "ring {" + std::to_string(number) + "} is never closed");
    }
    return std::move(graph_);
  }

private:
  struct OpenRing {
    int atom;
    int order;
    std::size_t position;
  };

  [[noreturn]] void fail(ParseErrorKind kind, std::size_t at,
                         const std::string &message) const {
    throw ParseError(kind, std::min(at, text_.size()), message);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void expect(char c) {
    if (peek() != c)
      fail(ParseErrorKind::kUnexpectedChar, pos_,
           std::string("expected '") + c + "'");
    ++pos_;
  }

  std::uint64_t number() {
    if (!std::isdigit(static_cast<unsigned char>(peek())))
      fail(ParseErrorKind::kUnexpectedChar, pos_, "expected digit");
    std::uint64_t value = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      value = std::min(kNumberCap, value * 10 + static_cast<unsigned>(peek() - '0'));
      ++pos_;
    }
    return value;
  }

  int atom() {
    const std::size_t start = pos_;
    expect('[');
    const std::size_t symbol_at = pos_;
    if (!std::isupper(static_cast<unsigned char>(peek())))
      fail(ParseErrorKind::kUnexpectedChar, pos_, "expected element symbol");
    std::string symbol(1, text_[pos_++]);
    if (std::islower(static_cast<unsigned char>(peek())))
      symbol += text_[pos_++];
    if (symbol == "H" || !table_.contains(symbol))
      fail(ParseErrorKind::kUnknownElement, symbol_at,
           "unknown element '" + symbol + "'");
    std::uint64_t h = 0;
    if (peek() == 'H') {
      ++pos_;
      h = std::isdigit(static_cast<unsigned char>(peek())) ? number() : 1;
    }
    expect(']');
    if (h > static_cast<std::uint64_t>(table_.valence(symbol)))
      fail(ParseErrorKind::kOversaturated, start,
           "hydrogen count exceeds valence of " + symbol);
    return graph_.add_atom(table_, symbol, static_cast<int>(h));
  }

  // Parses bond (chain | ring) hanging off `from`. Returns the new chain atom,
  // or -1 when the link was a ring marker.
  int link(int from) {
    const std::size_t bond_at = pos_;
    const int order = bond_order(peek());
    if (order == 0)
      fail(ParseErrorKind::kUnexpectedChar, pos_, "expected bond symbol");
    ++pos_;
    if (peek() == '{') {
      ring(from, order, bond_at);
      return -1;
    }
    const int to = atom();
    bond(from, to, order, bond_at);
    return to;
  }

  void ring(int from, int order, std::size_t marker_at) {
    expect('{');
    const std::uint64_t n = number();
    expect('}');
    if (closed_rings_.count(n))
      fail(ParseErrorKind::kUnmatchedRing, marker_at,
           "ring {" + std::to_string(n) + "} used more than twice");
    auto it = open_rings_.find(n);
    if (it == open_rings_.end()) {
      open_rings_.emplace(n, OpenRing{from, order, marker_at});
      return;
    }
    const OpenRing opened = it->second;
    open_rings_.erase(it);
    closed_rings_.insert(n);
    if (opened.order != order)
      fail(ParseErrorKind::kRingBondMismatch, marker_at,
           "ring {" + std::to_string(n) + "} bond symbols differ");
    if (opened.atom == from || graph_.find_bond(opened.atom, from) >= 0)
      fail(ParseErrorKind::kUnmatchedRing, marker_at,
           "ring {" + std::to_string(n) + "} duplicates an existing bond");
    bond(opened.atom, from, order, marker_at);
  }

  void bond(int a, int b, int order, std::size_t at) {
    if (graph_.free_valence(a) < order || graph_.free_valence(b) < order)
      fail(ParseErrorKind::kOversaturated, at, "bond exceeds valence");
    graph_.add_bond(a, b, order);
  }

  const ElementTable &table_;
  std::string_view text_;
  std::size_t pos_ = 0;
  MoleculeGraph graph_;
  std::map<std::uint64_t, OpenRing> open_rings_;
  std::set<std::uint64_t> closed_rings_;
};

// Spanning-tree decomposition shared by both writers.
struct Traversal {
  std::vector<std::vector<int>> children;  // per atom, ascending
  std::vector<std::vector<int>> closures;  // per atom, bond indices
  std::vector<char> is_closure;            // per bond
  std::vector<int> preorder;
};

Traversal traverse(const MoleculeGraph &g) {
  const std::size_t n = g.atom_count();
  if (n == 0)
    throw Error(ErrorCode::kEmptyGraph, "cannot serialize an empty graph");
  Traversal t;
  t.children.resize(n);
  t.closures.resize(n);
  t.is_closure.assign(g.bond_count(), 0);
  std::vector<char> seen(n, 0);
  std::vector<int> tree_bond(g.bond_count(), 0);

  std::vector<std::vector<int>> adjacent(n);
  for (int i = 0; i < static_cast<int>(n); ++i)
    adjacent[static_cast<std::size_t>(i)] = g.neighbors(i);

  // Iterative DFS: frame = (atom, next neighbor slot).
  std::vector<std::pair<int, std::size_t>> stack;
  stack.emplace_back(g.root(), 0);
  seen[static_cast<std::size_t>(g.root())] = 1;
  t.preorder.push_back(g.root());
  while (!stack.empty()) {
    auto &[u, slot] = stack.back();
    const auto &adj = adjacent[static_cast<std::size_t>(u)];
    if (slot == adj.size()) {
      stack.pop_back();
      continue;
    }
    const int v = adj[slot++];
    if (seen[static_cast<std::size_t>(v)])
      continue;
    seen[static_cast<std::size_t>(v)] = 1;
    tree_bond[static_cast<std::size_t>(g.find_bond(u, v))] = 1;
    t.children[static_cast<std::size_t>(u)].push_back(v);
    t.preorder.push_back(v);
    stack.emplace_back(v, 0);
  }
  if (t.preorder.size() != n)
    throw Error(ErrorCode::kInvalidArgument, "cannot serialize a disconnected graph");

  for (std::size_t b = 0; b < g.bond_count(); ++b) {
    if (tree_bond[b])
      continue;
    t.is_closure[b] = 1;
    const auto &bd = g.bond(static_cast<int>(b));
    t.closures[static_cast<std::size_t>(bd.a)].push_back(static_cast<int>(b));
    t.closures[static_cast<std::size_t>(bd.b)].push_back(static_cast<int>(b));
  }
  // Order by discovery rank of the far end; unlike raw indices this survives
  // renumbering into text order.
  std::vector<int> rank(n);
  for (std::size_t i = 0; i < n; ++i)
    rank[static_cast<std::size_t>(t.preorder[i])] = static_cast<int>(i);
  for (int u = 0; u < static_cast<int>(n); ++u) {
    auto &c = t.closures[static_cast<std::size_t>(u)];
    std::sort(c.begin(), c.end(), [&](int x, int y) {
      return rank[static_cast<std::size_t>(g.bond(x).other(u))] <
             rank[static_cast<std::size_t>(g.bond(y).other(u))];
    });
  }
  return t;
}

// Writer callbacks differ only in how atoms, bonds and ring markers look.
template <typename AtomFn, typename ClosureFn, typename BondFn>
std::string write(const MoleculeGraph &g, const Traversal &t, bool closures_as_items,
                  AtomFn atom_text, ClosureFn closure_text, BondFn bond_text) {
  std::string out;
  std::vector<int> ring_number(g.bond_count(), 0);
  int next_ring = 1;
  auto number_of = [&](int bond) {
    auto &slot = ring_number[static_cast<std::size_t>(bond)];
    if (slot == 0)
      slot = next_ring++;
    return slot;
  };

  // Explicit stack of pending text pieces: either an atom to expand or a
  // literal string.
  struct Task {
    int atom;  // -1 for literal
    std::string literal;
  };
  std::vector<Task> todo;
  todo.push_back({g.root(), {}});
  while (!todo.empty()) {
    Task task = std::move(todo.back());
    todo.pop_back();
    if (task.atom < 0) {
      out += task.literal;
      continue;
    }
    const int u = task.atom;
    const auto us = static_cast<std::size_t>(u);
    out += atom_text(u);

    // Items in emission order.
    struct Item {
      int closure_bond;  // -1 for child
      int child;
    };
    std::vector<Item> items;
    for (int b : t.closures[us])
      items.push_back({b, -1});
    if (!closures_as_items) {
      for (const auto &it : items)
        out += closure_text(it.closure_bond, number_of(it.closure_bond));
      items.clear();
    }
    for (int c : t.children[us])
      items.push_back({-1, c});

    // Push in reverse so the first item is expanded first.
    std::vector<Task> pieces;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const bool last = i + 1 == items.size();
      const auto &it = items[i];
      if (!last)
        pieces.push_back({-1, "("});
      if (it.closure_bond >= 0) {
        // Atoms are expanded in text order, so numbering here is
        // first-emission order.
        pieces.push_back({-1, closure_text(it.closure_bond, number_of(it.closure_bond))});
      } else {
        const int bond = g.find_bond(u, it.child);
        pieces.push_back({-1, bond_text(g.bond(bond).order)});
        pieces.push_back({it.child, {}});
      }
      if (!last)
        pieces.push_back({-1, ")"});
    }
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it)
      todo.push_back(std::move(*it));
  }
  return out;
}

// Lowest Daylight normal valence >= used, minus used; -1 if not an organic
// subset element or no normal valence fits.
int implicit_hydrogens(const std::string &element, int used) {
  static const std::map<std::string, std::vector<int>, std::less<>> normal = {
      {"B", {3}},     {"C", {4}},  {"N", {3, 5}}, {"O", {2}},
      {"P", {3, 5}},  {"S", {2, 4, 6}}, {"F", {1}}, {"Cl", {1}},
      {"Br", {1}},    {"I", {1}},
  };
  auto it = normal.find(element);
  if (it == normal.end())
    return -1;
  for (int v : it->second)
    if (v >= used)
      return v - used;
  return -1;
}

std::string ring_label(int n) {
  if (n < 10)
    return std::to_string(n);
  if (n < 100)
    return "%" + std::to_string(n);
  return "%(" + std::to_string(n) + ")";
}

} // namespace

MoleculeGraph parse(const ElementTable &table, std::string_view text) {
  return Parser(table, text).run();
}

std::string serialize(const MoleculeGraph &g) {
  const Traversal t = traverse(g);
  auto atom_text = [&](int u) {
    const auto &a = g.atom(u);
    std::string s = "[" + a.element;
    if (a.h_count == 1)
      s += "H";
    else if (a.h_count > 1)
      s += "H" + std::to_string(a.h_count);
    return s + "]";
  };
  auto closure_text = [&](int bond, int number) {
    return std::string(1, bond_symbol(g.bond(bond).order)) + "{" +
           std::to_string(number) + "}";
  };
  auto bond_text = [](int order) { return std::string(1, bond_symbol(order)); };
  return write(g, t, true, atom_text, closure_text, bond_text);
}

std::string to_standard_smiles(const MoleculeGraph &g) {
  if (!g.is_complete())
    throw Error(ErrorCode::kIncompleteMolecule,
                "standard SMILES needs every valence filled");
  const Traversal t = traverse(g);
  auto atom_text = [&](int u) {
    const auto &a = g.atom(u);
    const int used = g.bond_order_sum(u);
    if (implicit_hydrogens(a.element, used) == a.h_count)
      return a.element;
    std::string s = "[" + a.element;
    if (a.h_count == 1)
      s += "H";
    else if (a.h_count > 1)
      s += "H" + std::to_string(a.h_count);
    return s + "]";
  };
  auto bond_text = [](int order) {
    return order == 1 ? std::string() : std::string(1, bond_symbol(order));
  };
  auto closure_text = [&](int bond, int number) {
    return bond_text(g.bond(bond).order) + ring_label(number);
  };
  return write(g, t, false, atom_text, closure_text, bond_text);
}

MoleculeGraph canonicalize(const ElementTable &table, const MoleculeGraph &g) {
  return parse(table, serialize(g));
}

bool roundtrip_check(const ElementTable &table, std::string_view text) {
  const MoleculeGraph first = parse(table, text);
  const MoleculeGraph second = parse(table, serialize(first));
  return isomorphic(first, second);
}

std::vector<int> ring_closure_bonds(const MoleculeGraph &g) {
  const Traversal t = traverse(g);
  std::vector<int> out;
  for (std::size_t b = 0; b < t.is_closure.size(); ++b)
    if (t.is_closure[b])
      out.push_back(static_cast<int>(b));
  return out;
}

} // namespace molforge::exsmiles
