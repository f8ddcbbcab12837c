//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/chem_model.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "molforge/error.hpp"

namespace molforge {

namespace {

bool well_formed_symbol(std::string_view s) {
  if (s.empty() || s.size() > 2)
    return false;
  if (!std::isupper(static_cast<unsigned char>(s[0])))
    return false;
  return s.size() == 1 || std::islower(static_cast<unsigned char>(s[1]));
}

[[noreturn]] void unknown_element(std::string_view symbol) {
  throw Error(ErrorCode::kUnknownElement,
              "unknown element '" + std::string(symbol) + "'");
}

} // namespace

ElementTable::ElementTable() {
  entries_.emplace("H", ElementInfo{1, 1.008, true});
}

ElementTable ElementTable::organic() {
  ElementTable t;
  // Lowest common valence, standard atomic weights.
  t.entries_["B"] = {3, 10.81, true};
  t.entries_["C"] = {4, 12.011, true};
  t.entries_["N"] = {3, 14.007, true};
  t.entries_["O"] = {2, 15.999, true};
  t.entries_["F"] = {1, 18.998, true};
  t.entries_["P"] = {3, 30.974, true};
  t.entries_["S"] = {2, 32.06, true};
  t.entries_["Cl"] = {1, 35.45, true};
  t.entries_["Br"] = {1, 79.904, true};
  t.entries_["I"] = {1, 126.904, true};
  t.entries_["Si"] = {4, 28.085, false};
  t.entries_["Se"] = {2, 78.971, false};
  return t;
}

bool ElementTable::contains(std::string_view symbol) const {
  return entries_.find(symbol) != entries_.end();
}

bool ElementTable::is_enabled(std::string_view symbol) const {
  auto it = entries_.find(symbol);
  return it != entries_.end() && it->second.enabled;
}

const ElementInfo &ElementTable::info(std::string_view symbol) const {
  auto it = entries_.find(symbol);
  if (it == entries_.end())
    unknown_element(symbol);
  return it->second;
}

int ElementTable::valence(std::string_view symbol) const {
  return info(symbol).valence;
}

double ElementTable::atomic_weight(std::string_view symbol) const {
  return info(symbol).atomic_weight;
}

void ElementTable::set(const std::string &symbol, ElementInfo info) {
  if (!well_formed_symbol(symbol))
    throw Error(ErrorCode::kInvalidArgument,
                "malformed element symbol '" + symbol + "'");
  if (info.valence < 1 || !(info.atomic_weight > 0))
    throw Error(ErrorCode::kInvalidArgument,
                "element '" + symbol + "' needs valence >= 1 and weight > 0");
  if (symbol == "H" && info.valence != 1)
    throw Error(ErrorCode::kInvalidArgument, "hydrogen valence is fixed at 1");
  if (symbol == "H")
    info.enabled = true;
  entries_[symbol] = info;
}

void ElementTable::enable_only(const std::vector<std::string> &symbols) {
  for (const auto &s : symbols)
    if (!contains(s))
      unknown_element(s);
  for (auto &[symbol, info] : entries_)
    info.enabled = symbol == "H" ||
                   std::find(symbols.begin(), symbols.end(), symbol) != symbols.end();
}

std::vector<std::string> ElementTable::heavy_elements() const {
  std::vector<std::string> out;
  for (const auto &[symbol, info] : entries_)
    if (info.enabled && symbol != "H")
      out.push_back(symbol);
  return out;
}

// --- MoleculeGraph ---------------------------------------------------------

void MoleculeGraph::check_atom(int atom) const {
  if (atom < 0 || static_cast<std::size_t>(atom) >= atoms_.size())
    throw Error(ErrorCode::kInvalidArgument,
                "atom index " + std::to_string(atom) + " out of range");
}

int MoleculeGraph::add_atom(const ElementTable &table, std::string_view element,
                            int h_count) {
  if (element == "H")
    throw Error(ErrorCode::kInvalidArgument,
                "hydrogen is folded into h_count, never a graph node");
  const int valence = table.valence(element);
  if (h_count < 0 || h_count > valence)
    throw Error(ErrorCode::kInvalidArgument,
                "h_count " + std::to_string(h_count) + " oversaturates " +
                    std::string(element));
  atoms_.push_back(Atom{std::string(element), h_count, valence});
  return static_cast<int>(atoms_.size()) - 1;
}

int MoleculeGraph::add_atom(const Atom &atom) {
  if (atom.element == "H" || atom.valence < 1 || atom.h_count < 0 ||
      atom.h_count > atom.valence)
    throw Error(ErrorCode::kInvalidArgument, "malformed atom " + atom.element);
  atoms_.push_back(atom);
  return static_cast<int>(atoms_.size()) - 1;
}

int MoleculeGraph::add_bond(int a, int b, int order) {
  check_atom(a);
  check_atom(b);
  if (a == b)
    throw Error(ErrorCode::kInvalidArgument, "self-bond");
  if (order < 1 || order > 3)
    throw Error(ErrorCode::kInvalidArgument, "bond order must be 1..3");
  if (find_bond(a, b) >= 0)
    throw Error(ErrorCode::kInvalidArgument, "duplicate bond");
  if (free_valence(a) < order || free_valence(b) < order)
    throw Error(ErrorCode::kInvalidArgument, "bond oversaturates an endpoint");
  bonds_.push_back(Bond{a, b, order});
  return static_cast<int>(bonds_.size()) - 1;
}

void MoleculeGraph::set_h_count(int atom, int h_count) {
  check_atom(atom);
  auto &at = atoms_[static_cast<std::size_t>(atom)];
  if (h_count < 0 || bond_order_sum(atom) + h_count > at.valence)
    throw Error(ErrorCode::kInvalidArgument, "h_count oversaturates atom");
  at.h_count = h_count;
}

void MoleculeGraph::set_element(const ElementTable &table, int atom,
                                std::string_view element) {
  check_atom(atom);
  if (element == "H")
    throw Error(ErrorCode::kInvalidArgument,
                "hydrogen is folded into h_count, never a graph node");
  const int valence = table.valence(element);
  auto &at = atoms_[static_cast<std::size_t>(atom)];
  if (bond_order_sum(atom) + at.h_count > valence)
    throw Error(ErrorCode::kInvalidArgument,
                std::string(element) + " cannot carry the existing bonds");
  at.element = std::string(element);
  at.valence = valence;
}

void MoleculeGraph::set_bond_order(int bond, int order) {
  if (bond < 0 || static_cast<std::size_t>(bond) >= bonds_.size())
    throw Error(ErrorCode::kInvalidArgument, "bond index out of range");
  if (order < 1 || order > 3)
    throw Error(ErrorCode::kInvalidArgument, "bond order must be 1..3");
  auto &b = bonds_[static_cast<std::size_t>(bond)];
  const int delta = order - b.order;
  if (free_valence(b.a) < delta || free_valence(b.b) < delta)
    throw Error(ErrorCode::kInvalidArgument, "bond order oversaturates atom");
  b.order = order;
}

void MoleculeGraph::remove_bond(int bond) {
  if (bond < 0 || static_cast<std::size_t>(bond) >= bonds_.size())
    throw Error(ErrorCode::kInvalidArgument, "bond index out of range");
  bonds_.erase(bonds_.begin() + bond);
}

void MoleculeGraph::remove_atom(int atom) {
  check_atom(atom);
  std::erase_if(bonds_, [atom](const Bond &b) { return b.touches(atom); });
  for (auto &b : bonds_) {
    if (b.a > atom)
      --b.a;
    if (b.b > atom)
      --b.b;
  }
  atoms_.erase(atoms_.begin() + atom);
  if (root_ == atom)
    root_ = 0;
  else if (root_ > atom)
    --root_;
}

void MoleculeGraph::set_root(int atom) {
  check_atom(atom);
  root_ = atom;
}

int MoleculeGraph::bond_order_sum(int atom) const {
  int sum = 0;
  for (const auto &b : bonds_)
    if (b.touches(atom))
      sum += b.order;
  return sum;
}

int MoleculeGraph::free_valence(int atom) const {
  const auto &at = atoms_[static_cast<std::size_t>(atom)];
  return at.valence - at.h_count - bond_order_sum(atom);
}

int MoleculeGraph::degree(int atom) const {
  return static_cast<int>(std::count_if(
      bonds_.begin(), bonds_.end(), [atom](const Bond &b) { return b.touches(atom); }));
}

bool MoleculeGraph::is_complete() const {
  for (int i = 0; i < static_cast<int>(atoms_.size()); ++i)
    if (!is_complete_atom(i))
      return false;
  return true;
}

int MoleculeGraph::find_bond(int a, int b) const {
  for (std::size_t i = 0; i < bonds_.size(); ++i) {
    const auto &bd = bonds_[i];
    if ((bd.a == a && bd.b == b) || (bd.a == b && bd.b == a))
      return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> MoleculeGraph::neighbors(int atom) const {
  std::vector<int> out;
  for (const auto &b : bonds_)
    if (b.touches(atom))
      out.push_back(b.other(atom));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> MoleculeGraph::incident_bonds(int atom) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < bonds_.size(); ++i)
    if (bonds_[i].touches(atom))
      out.push_back(static_cast<int>(i));
  return out;
}

bool MoleculeGraph::is_connected() const {
  if (atoms_.empty())
    return true;
  std::vector<char> seen(atoms_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t visited = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (const auto &b : bonds_) {
      if (!b.touches(u))
        continue;
      int v = b.other(u);
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == atoms_.size();
}

int MoleculeGraph::total_h() const {
  return std::accumulate(atoms_.begin(), atoms_.end(), 0,
                         [](int acc, const Atom &a) { return acc + a.h_count; });
}

void MoleculeGraph::cap_with_hydrogens() {
  for (int i = 0; i < static_cast<int>(atoms_.size()); ++i)
    atoms_[static_cast<std::size_t>(i)].h_count += free_valence(i);
}

int MoleculeGraph::append(const MoleculeGraph &other) {
  const int offset = static_cast<int>(atoms_.size());
  atoms_.insert(atoms_.end(), other.atoms_.begin(), other.atoms_.end());
  for (const auto &b : other.bonds_)
    bonds_.push_back(Bond{b.a + offset, b.b + offset, b.order});
  return offset;
}

// --- rules and validation --------------------------------------------------

void check_rules(const ValidityRules &rules) {
  if (rules.min_atoms < 1 || rules.max_atoms < rules.min_atoms)
    throw Error(ErrorCode::kInvalidArgument,
                "rules need 1 <= min_atoms <= max_atoms");
  if (!(rules.max_weight > 0))
    throw Error(ErrorCode::kInvalidArgument, "rules need max_weight > 0");
}

std::string to_string(const Violation &v) {
  switch (v.kind) {
  case ViolationKind::kDisconnected: return "Disconnected";
  case ViolationKind::kTooFewAtoms: return "TooFewAtoms";
  case ViolationKind::kTooManyAtoms: return "TooManyAtoms";
  case ViolationKind::kOverWeight: return "OverWeight";
  case ViolationKind::kIncompleteAtom:
    return "IncompleteAtom(" + std::to_string(v.atom) + ")";
  }
  return "Unknown";
}

bool ValidityReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation &v) { return v.kind == kind; });
}

int valence_of(const ElementTable &table, std::string_view element) {
  return table.valence(element);
}

double molecular_weight(const ElementTable &table, const MoleculeGraph &g) {
  if (g.empty())
    throw Error(ErrorCode::kEmptyGraph, "molecular weight of an empty graph");
  const double h_weight = table.atomic_weight("H");
  double total = 0;
  for (const auto &a : g.atoms())
    total += table.atomic_weight(a.element) + a.h_count * h_weight;
  return total;
}

ValidityReport validate(const ElementTable &table, const ValidityRules &rules,
                        const MoleculeGraph &g) {
  ValidityReport report;
  for (const auto &a : g.atoms())
    (void)table.info(a.element);  // UnknownElement is the only hard error

  if (!g.is_connected())
    report.violations.push_back({ViolationKind::kDisconnected});
  const int heavy = static_cast<int>(g.atom_count());
  if (heavy < rules.min_atoms)
    report.violations.push_back({ViolationKind::kTooFewAtoms});
  if (heavy > rules.max_atoms)
    report.violations.push_back({ViolationKind::kTooManyAtoms});
  if (!g.empty() && molecular_weight(table, g) > rules.max_weight)
    report.violations.push_back({ViolationKind::kOverWeight});
  if (rules.require_complete)
    for (int i = 0; i < heavy; ++i)
      if (!g.is_complete_atom(i))
        report.violations.push_back({ViolationKind::kIncompleteAtom, i});
  return report;
}

int handshake_residual(const MoleculeGraph &g) {
  int lhs = 0;
  for (const auto &a : g.atoms())
    lhs += a.valence - a.h_count;
  int bonds = 0;
  for (const auto &b : g.bonds())
    bonds += b.order;
  return lhs - 2 * bonds;
}

} // namespace molforge
