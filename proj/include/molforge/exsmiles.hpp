//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_EXSMILES_HPP_
#define MOLFORGE_EXSMILES_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "molforge/chem_model.hpp"

namespace molforge {

// Expanded SMILES: every heavy atom bracketed with its folded hydrogens
// ("[CH2]"), every bond explicit ("-", "=", "#"), branches in parentheses and
// ring closures as "{n}" preceded by their bond symbol at both ends:
//
//   chain  := atom item*
//   item   := '(' link ')' | link
//   link   := bond (chain | '{' uint '}')
//   atom   := '[' element ('H' uint?)? ']'
//
// Fragments with open valences are accepted; completeness is a validity rule,
// not a syntax rule.
namespace exsmiles {

// Throws ParseError. Atoms are indexed in order of appearance; root is atom 0.
MoleculeGraph parse(const ElementTable &table, std::string_view text);

// Canonical form: DFS from the root visiting neighbours by ascending atom
// index. At each atom the ring-closure markers come first (ordered by when the
// far atom is reached), then tree children; every item except the last is
// parenthesized. Ring numbers are assigned 1, 2, ... in first-emission order.
// Throws kInvalidArgument if disconnected.
std::string serialize(const MoleculeGraph &g);

// Daylight-style Kekulé SMILES over the same traversal. Throws
// kIncompleteMolecule if any atom has an open valence.
std::string to_standard_smiles(const MoleculeGraph &g);

// parse(serialize(g)): the graph renumbered in canonical DFS order.
MoleculeGraph canonicalize(const ElementTable &table, const MoleculeGraph &g);

// True iff serialize(parse(text)) parses to a graph isomorphic to
// parse(text). Propagates ParseError.
bool roundtrip_check(const ElementTable &table, std::string_view text);

// Ring-closure bonds of the canonical traversal (bond indices into g), i.e.
// the bonds written as "{n}" markers in serialize(g).
std::vector<int> ring_closure_bonds(const MoleculeGraph &g);

} // namespace exsmiles

// Labelled graph isomorphism on (element, h_count) atoms and bond orders.
bool isomorphic(const MoleculeGraph &a, const MoleculeGraph &b);

} // namespace molforge

#endif // MOLFORGE_EXSMILES_HPP_
