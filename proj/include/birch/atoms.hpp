#pragma once

#include <algorithm>
#include <compare>
#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

namespace birch {

// A data value whose only observable structure is equality. Atoms are held by
// numeric id, but the ids carry no meaning beyond identity: every operation in
// this library is invariant under bijective re-labelling (Renaming below), and
// the tests assert as much.
struct Atom {
  uint32_t id = 0;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

// A finite-support bijection on atoms. Only the moved atoms are stored; all
// other atoms are fixed. Constructed from an injective list of (from, to)
// pairs, which is completed to a permutation by cycling the unmatched image
// atoms back onto the unmatched domain atoms (in sorted order), so that a map
// like {42 -> 0} becomes the swap {42 -> 0, 0 -> 42}.
class Renaming {
 public:
  Renaming() = default;

  static Renaming identity() { return {}; }
  static Renaming transposition(Atom a, Atom b);
  // Throws std::invalid_argument if the pairs are not an injective map.
  static Renaming from_pairs(std::vector<std::pair<Atom, Atom>> pairs);

  Atom operator()(Atom a) const;
  bool is_identity() const { return moved_.empty(); }

  // Composition in application order: (f.then(g))(a) == g(f(a)).
  Renaming then(const Renaming& g) const;
  Renaming inverse() const;

  // Sorted (from, to) pairs with from != to.
  const std::vector<std::pair<Atom, Atom>>& moved() const { return moved_; }

  friend auto operator<=>(const Renaming&, const Renaming&) = default;

 private:
  std::vector<std::pair<Atom, Atom>> moved_;
};

// Values that atoms act on: renamable, and able to report which atoms occur
// in them.
template <typename T>
concept AtomValue = requires(const T& x, const Renaming& r, std::vector<Atom>& acc) {
  { x.renamed(r) } -> std::convertible_to<T>;
  x.collect_atoms(acc);
};

template <AtomValue T>
T apply(const Renaming& r, const T& x) {
  return x.renamed(r);
}

// Sorted set of atoms occurring in a value.
template <AtomValue T>
std::vector<Atom> support(const T& x) {
  std::vector<Atom> acc;
  x.collect_atoms(acc);
  std::sort(acc.begin(), acc.end());
  acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
  return acc;
}

// How a single atom occurs inside a value, encoded so that equal signatures
// mean the atoms are interchangeable (swapping them fixes the value). The
// encoding must not mention atom identities. Values expose this via an
// atom_signature(Atom, AtomSignature&) member.
using AtomSignature = std::vector<int64_t>;

template <typename T>
concept SignatureValue = AtomValue<T> &&
    requires(const T& x, Atom a, AtomSignature& sig) { x.atom_signature(a, sig); };

// Appends one part's signature as a length-prefixed section. Composite values
// must splice their parts through this: a bare concatenation is ambiguous,
// because the parts may emit arbitrary values (register indices, counts) that
// can mimic a neighbouring section.
template <typename T>
void signature_section(const T& part, Atom a, AtomSignature& sig) {
  const size_t len_at = sig.size();
  sig.push_back(0);
  part.atom_signature(a, sig);
  sig[len_at] = (int64_t)(sig.size() - len_at - 1);
}

template <typename T>
struct Canon {
  T value;
  Renaming renaming;  // maps the input onto the canonical value
};

// Renaming that maps `atoms` (paired with their signatures) onto the smallest
// naturals not claimed by `pinned`, ordered by signature. This realises the
// lexicographically least relabelling of a value whose atoms do not interact:
// sorting the per-atom columns is exactly the minimal encoding, and ties are
// harmless because equal signatures mean interchangeable atoms.
Renaming canonical_renaming(std::vector<std::pair<AtomSignature, Atom>> atoms,
                            std::span<const Atom> pinned = {});

// Canonical representative of x's orbit (under renamings fixing `pinned`
// pointwise), together with the renaming that produced it.
template <SignatureValue T>
Canon<T> canonicalize(const T& x, std::span<const Atom> pinned = {}) {
  std::vector<std::pair<AtomSignature, Atom>> sigs;
  for (Atom a : support(x)) {
    if (std::ranges::find(pinned, a) != pinned.end()) continue;
    AtomSignature sig;
    x.atom_signature(a, sig);
    sigs.emplace_back(std::move(sig), a);
  }
  Renaming r = canonical_renaming(std::move(sigs), pinned);
  return {x.renamed(r), std::move(r)};
}

template <SignatureValue T>
bool is_canonical(const T& x) {
  return canonicalize(x).value == x;
}

template <SignatureValue T>
bool same_orbit(const T& x, const T& y) {
  return canonicalize(x).value == canonicalize(y).value;
}

// Smallest atom ids not occurring in `used` (which need not be sorted).
std::vector<Atom> fresh_atoms(std::span<const Atom> used, size_t count);

inline Atom fresh_atom(std::span<const Atom> used) { return fresh_atoms(used, 1)[0]; }

}  // namespace birch
