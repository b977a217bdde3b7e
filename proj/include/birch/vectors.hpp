#pragma once

#include <cstdint>
#include <limits>

#include "birch/atoms.hpp"

namespace birch {

// Index into the owning net's place tables. Plain places and atom places are
// numbered independently.
using PlaceId = int32_t;

// A finitely supported integer vector over plain places and (atom place, atom)
// pairs: the effect of a transition, or a marking when all entries are
// nonnegative. Entries are kept sorted with zeros pruned, so equal vectors
// compare equal structurally.
struct DataVector {
  std::vector<std::pair<PlaceId, int64_t>> plain;
  std::vector<std::pair<std::pair<PlaceId, Atom>, int64_t>> data;

  friend auto operator<=>(const DataVector&, const DataVector&) = default;

  static DataVector unit_plain(PlaceId h, int64_t count = 1);
  static DataVector unit_data(PlaceId p, Atom a, int64_t count = 1);

  int64_t at_plain(PlaceId h) const;
  int64_t at(PlaceId p, Atom a) const;
  void add_plain(PlaceId h, int64_t delta);
  void add_data(PlaceId p, Atom a, int64_t delta);

  DataVector& operator+=(const DataVector& other);
  friend DataVector operator+(DataVector a, const DataVector& b) { return a += b; }
  DataVector negated() const;
  friend DataVector operator-(const DataVector& a, const DataVector& b) {
    return a + b.negated();
  }

  bool is_zero() const { return plain.empty() && data.empty(); }
  bool nonnegative() const;
  // Token count at atom place p (sum of positive entries).
  int64_t place_size(PlaceId p) const;
  // Sum of absolute values of all entries.
  int64_t norm() const;

  DataVector renamed(const Renaming& r) const;
  void collect_atoms(std::vector<Atom>& acc) const;
  void atom_signature(Atom a, AtomSignature& sig) const;
};

// Natural number extended with omega. The sentinel is the largest int64, so
// default comparisons give the intended order with omega on top.
struct NatOmega {
  static constexpr int64_t kOmegaV = std::numeric_limits<int64_t>::max();
  int64_t v = 0;

  static NatOmega omega() { return {kOmegaV}; }
  static NatOmega fin(int64_t n) { return {n}; }
  bool is_omega() const { return v == kOmegaV; }

  // Omega absorbs addition; finite values may go negative (caller checks).
  NatOmega plus(int64_t delta) const { return is_omega() ? *this : NatOmega{v + delta}; }

  friend auto operator<=>(const NatOmega&, const NatOmega&) = default;
};

// A valuation of places in naturals extended with omega, in simple form: the
// plain part is a finite map, and each atom place carries a default of 0 or
// omega plus finitely many exception atoms whose value differs from the
// default. Downward closure of a configuration with such a valuation is a
// simple ideal; covers are finite unions of these.
struct OmegaValuation {
  struct PlaceData {
    PlaceId place = 0;
    bool default_omega = false;
    std::vector<std::pair<Atom, NatOmega>> exceptions;  // sorted, value != default
    friend auto operator<=>(const PlaceData&, const PlaceData&) = default;
  };

  std::vector<std::pair<PlaceId, NatOmega>> plain;  // sorted, value != 0
  std::vector<PlaceData> atom;                      // sorted by place, no trivial rows

  friend auto operator<=>(const OmegaValuation&, const OmegaValuation&) = default;

  static OmegaValuation from_vector(const DataVector& v);  // requires nonnegative

  NatOmega at_plain(PlaceId h) const;
  NatOmega at(PlaceId p, Atom a) const;
  NatOmega default_of(PlaceId p) const;
  void set_plain(PlaceId h, NatOmega value);
  void set(PlaceId p, Atom a, NatOmega value);
  void set_default_omega(PlaceId p);

  // Adds a transition effect pointwise (omega absorbs). Returns false and
  // leaves *this unspecified if some finite entry would become negative.
  bool add(const DataVector& effect);

  bool is_finite() const;
  DataVector to_vector() const;  // requires is_finite()
  // Omega if the default is omega or any exception is omega; otherwise the
  // sum of positive finite entries.
  NatOmega place_size(PlaceId p) const;

  OmegaValuation renamed(const Renaming& r) const;
  void collect_atoms(std::vector<Atom>& acc) const;
  void atom_signature(Atom a, AtomSignature& sig) const;

  // Restores the representation invariants after direct mutation.
  void prune();
};

}  // namespace birch
