//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_CHEM_MODEL_HPP_
#define MOLFORGE_CHEM_MODEL_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace molforge {

struct ElementInfo {
  int valence = 0;           // bond-order units
  double atomic_weight = 0;  // amu
  bool enabled = false;
};

// Generation vocabulary and valence/weight data, keyed by case-sensitive
// symbol. "H" is always present with valence 1 and only ever appears as a
// per-atom hydrogen count.
class ElementTable {
public:
  ElementTable();

  // The organic subset H, B, C, N, O, F, P, S, Cl, Br, I enabled, plus a few
  // common extras (Si, Se) present but disabled.
  static ElementTable organic();

  bool contains(std::string_view symbol) const;
  bool is_enabled(std::string_view symbol) const;
  const ElementInfo &info(std::string_view symbol) const;
  int valence(std::string_view symbol) const;
  double atomic_weight(std::string_view symbol) const;

  // Adds or replaces an entry. Throws kInvalidArgument when valence < 1,
  // weight <= 0, the symbol is malformed, or the change would alter H.
  void set(const std::string &symbol, ElementInfo info);

  // Enables exactly the listed symbols (H stays enabled). Throws
  // kUnknownElement for absent symbols.
  void enable_only(const std::vector<std::string> &symbols);

  // Enabled symbols other than H, in table order.
  std::vector<std::string> heavy_elements() const;

  const std::map<std::string, ElementInfo, std::less<>> &entries() const {
    return entries_;
  }

private:
  std::map<std::string, ElementInfo, std::less<>> entries_;
};

struct Atom {
  std::string element;
  int h_count = 0;
  int valence = 0;  // copied from the table when the atom is created

  friend bool operator==(const Atom &, const Atom &) = default;
};

struct Bond {
  int a = 0;
  int b = 0;
  int order = 1;

  bool touches(int atom) const { return a == atom || b == atom; }
  int other(int atom) const { return a == atom ? b : a; }

  friend bool operator==(const Bond &, const Bond &) = default;
};

// Heavy-atom graph with folded hydrogens. Every mutating method enforces that
// no atom is oversaturated (bond-order sum + h_count <= valence) and that
// bonds are unique and non-looping; it throws kInvalidArgument otherwise.
// Connectivity is not enforced here (edits may pass through disconnected
// states); validate() reports it.
class MoleculeGraph {
public:
  MoleculeGraph() = default;

  int add_atom(const ElementTable &table, std::string_view element,
               int h_count = 0);
  // Copies an atom from another graph (valence included).
  int add_atom(const Atom &atom);
  int add_bond(int a, int b, int order);
  void set_h_count(int atom, int h_count);
  // Changes the element (and cached valence) keeping bonds and h_count.
  void set_element(const ElementTable &table, int atom, std::string_view element);
  void set_bond_order(int bond, int order);
  void remove_bond(int bond);
  // Removes the atom and its bonds; later atom indices shift down by one.
  void remove_atom(int atom);
  void set_root(int atom);

  std::size_t atom_count() const { return atoms_.size(); }
  std::size_t bond_count() const { return bonds_.size(); }
  bool empty() const { return atoms_.empty(); }
  const std::vector<Atom> &atoms() const { return atoms_; }
  const std::vector<Bond> &bonds() const { return bonds_; }
  const Atom &atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  const Bond &bond(int i) const { return bonds_[static_cast<std::size_t>(i)]; }
  int root() const { return root_; }

  int bond_order_sum(int atom) const;
  int free_valence(int atom) const;
  int degree(int atom) const;
  bool is_complete_atom(int atom) const { return free_valence(atom) == 0; }
  bool is_complete() const;
  // Index of the bond joining a and b, or -1.
  int find_bond(int a, int b) const;
  // Neighbor atom indices, ascending.
  std::vector<int> neighbors(int atom) const;
  // Bond indices incident on the atom, in bond order.
  std::vector<int> incident_bonds(int atom) const;
  bool is_connected() const;
  int total_h() const;

  // Fills every open valence with hydrogens.
  void cap_with_hydrogens();

  // Appends all atoms/bonds of other; returns the index offset applied.
  int append(const MoleculeGraph &other);

  friend bool operator==(const MoleculeGraph &, const MoleculeGraph &) = default;

private:
  void check_atom(int atom) const;

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  int root_ = 0;
};

// Atom-count/weight/completeness constraints a molecule must meet.
struct ValidityRules {
  int min_atoms = 1;
  int max_atoms = 50;
  double max_weight = 500.0;
  bool require_complete = true;
};

void check_rules(const ValidityRules &rules);

enum class ViolationKind {
  kDisconnected,
  kTooFewAtoms,
  kTooManyAtoms,
  kOverWeight,
  kIncompleteAtom,
};

struct Violation {
  ViolationKind kind;
  int atom = -1;  // set for kIncompleteAtom only

  friend bool operator==(const Violation &, const Violation &) = default;
};

std::string to_string(const Violation &violation);

struct ValidityReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
  bool has(ViolationKind kind) const;

  friend bool operator==(const ValidityReport &, const ValidityReport &) = default;
};

int valence_of(const ElementTable &table, std::string_view element);

// Heavy atoms plus folded hydrogens. Throws kEmptyGraph / kUnknownElement.
double molecular_weight(const ElementTable &table, const MoleculeGraph &g);

// Violations come in a fixed order: connectivity, counts, weight, then
// incomplete atoms by ascending index.
ValidityReport validate(const ElementTable &table, const ValidityRules &rules,
                        const MoleculeGraph &g);

// Sum over atoms of (valence - h_count) minus twice the bond-order sum. Zero
// for every complete molecule.
int handshake_residual(const MoleculeGraph &g);

} // namespace molforge

#endif // MOLFORGE_CHEM_MODEL_HPP_
