#include "birch/vectors.hpp"

#include <cstdlib>
#include <stdexcept>

namespace birch {

namespace {

// Merge-add for sorted sparse maps, pruning zeros.
template <typename K>
void merge_add(std::vector<std::pair<K, int64_t>>& into,
               const std::vector<std::pair<K, int64_t>>& from) {
  std::vector<std::pair<K, int64_t>> out;
  out.reserve(into.size() + from.size());
  auto a = into.begin();
  auto b = from.begin();
  while (a != into.end() || b != from.end()) {
    if (b == from.end() || (a != into.end() && a->first < b->first)) {
      out.push_back(*a++);
    } else if (a == into.end() || b->first < a->first) {
      out.push_back(*b++);
    } else {
      int64_t sum = a->second + b->second;
      if (sum != 0) out.emplace_back(a->first, sum);
      ++a, ++b;
    }
  }
  into = std::move(out);
}

template <typename K>
int64_t lookup(const std::vector<std::pair<K, int64_t>>& entries, const K& key) {
  auto it = std::lower_bound(entries.begin(), entries.end(), key,
                             [](const auto& p, const K& k) { return p.first < k; });
  return (it != entries.end() && it->first == key) ? it->second : 0;
}

template <typename K>
void bump(std::vector<std::pair<K, int64_t>>& entries, const K& key, int64_t delta) {
  if (delta == 0) return;
  auto it = std::lower_bound(entries.begin(), entries.end(), key,
                             [](const auto& p, const K& k) { return p.first < k; });
  if (it != entries.end() && it->first == key) {
    it->second += delta;
    if (it->second == 0) entries.erase(it);
  } else {
    entries.insert(it, {key, delta});
  }
}

}  // namespace

DataVector DataVector::unit_plain(PlaceId h, int64_t count) {
  DataVector v;
  if (count != 0) v.plain.emplace_back(h, count);
  return v;
}

DataVector DataVector::unit_data(PlaceId p, Atom a, int64_t count) {
  DataVector v;
  if (count != 0) v.data.emplace_back(std::pair{p, a}, count);
  return v;
}

int64_t DataVector::at_plain(PlaceId h) const { return lookup(plain, h); }

int64_t DataVector::at(PlaceId p, Atom a) const { return lookup(data, std::pair{p, a}); }

void DataVector::add_plain(PlaceId h, int64_t delta) { bump(plain, h, delta); }

void DataVector::add_data(PlaceId p, Atom a, int64_t delta) {
  bump(data, std::pair{p, a}, delta);
}

DataVector& DataVector::operator+=(const DataVector& other) {
  merge_add(plain, other.plain);
  merge_add(data, other.data);
  return *this;
}

DataVector DataVector::negated() const {
  DataVector out = *this;
  for (auto& [k, c] : out.plain) c = -c;
  for (auto& [k, c] : out.data) c = -c;
  return out;
}

bool DataVector::nonnegative() const {
  for (const auto& [k, c] : plain)
    if (c < 0) return false;
  for (const auto& [k, c] : data)
    if (c < 0) return false;
  return true;
}

int64_t DataVector::place_size(PlaceId p) const {
  int64_t total = 0;
  for (const auto& [k, c] : data)
    if (k.first == p && c > 0) total += c;
  return total;
}

int64_t DataVector::norm() const {
  int64_t total = 0;
  for (const auto& [k, c] : plain) total += std::abs(c);
  for (const auto& [k, c] : data) total += std::abs(c);
  return total;
}

DataVector DataVector::renamed(const Renaming& r) const {
  DataVector out = *this;
  for (auto& [k, c] : out.data) k.second = r(k.second);
  std::sort(out.data.begin(), out.data.end());
  return out;
}

void DataVector::collect_atoms(std::vector<Atom>& acc) const {
  for (const auto& [k, c] : data) acc.push_back(k.second);
}

void DataVector::atom_signature(Atom a, AtomSignature& sig) const {
  for (const auto& [k, c] : data)
    if (k.second == a) {
      sig.push_back(k.first);
      sig.push_back(c);
    }
}

OmegaValuation OmegaValuation::from_vector(const DataVector& v) {
  if (!v.nonnegative())
    throw std::invalid_argument("omega valuation from negative vector");
  OmegaValuation out;
  for (const auto& [h, c] : v.plain) out.plain.emplace_back(h, NatOmega::fin(c));
  for (const auto& [k, c] : v.data) out.set(k.first, k.second, NatOmega::fin(c));
  return out;
}

NatOmega OmegaValuation::at_plain(PlaceId h) const {
  auto it = std::lower_bound(plain.begin(), plain.end(), h,
                             [](const auto& p, PlaceId k) { return p.first < k; });
  return (it != plain.end() && it->first == h) ? it->second : NatOmega{0};
}

static const OmegaValuation::PlaceData* find_row(
    const std::vector<OmegaValuation::PlaceData>& rows, PlaceId p) {
  auto it = std::lower_bound(rows.begin(), rows.end(), p,
                             [](const auto& row, PlaceId k) { return row.place < k; });
  return (it != rows.end() && it->place == p) ? &*it : nullptr;
}

NatOmega OmegaValuation::at(PlaceId p, Atom a) const {
  const PlaceData* row = find_row(atom, p);
  if (!row) return NatOmega{0};
  auto it = std::lower_bound(row->exceptions.begin(), row->exceptions.end(), a,
                             [](const auto& e, Atom k) { return e.first < k; });
  if (it != row->exceptions.end() && it->first == a) return it->second;
  return row->default_omega ? NatOmega::omega() : NatOmega{0};
}

NatOmega OmegaValuation::default_of(PlaceId p) const {
  const PlaceData* row = find_row(atom, p);
  return (row && row->default_omega) ? NatOmega::omega() : NatOmega{0};
}

void OmegaValuation::set_plain(PlaceId h, NatOmega value) {
  auto it = std::lower_bound(plain.begin(), plain.end(), h,
                             [](const auto& p, PlaceId k) { return p.first < k; });
  if (it != plain.end() && it->first == h) {
    if (value == NatOmega{0}) plain.erase(it);
    else it->second = value;
  } else if (value != NatOmega{0}) {
    plain.insert(it, {h, value});
  }
}

void OmegaValuation::set(PlaceId p, Atom a, NatOmega value) {
  auto it = std::lower_bound(atom.begin(), atom.end(), p,
                             [](const auto& row, PlaceId k) { return row.place < k; });
  if (it == atom.end() || it->place != p) it = atom.insert(it, PlaceData{p, false, {}});
  NatOmega def = it->default_omega ? NatOmega::omega() : NatOmega{0};
  auto e = std::lower_bound(it->exceptions.begin(), it->exceptions.end(), a,
                            [](const auto& x, Atom k) { return x.first < k; });
  if (e != it->exceptions.end() && e->first == a) {
    if (value == def) it->exceptions.erase(e);
    else e->second = value;
  } else if (value != def) {
    it->exceptions.insert(e, {a, value});
  }
  if (!it->default_omega && it->exceptions.empty()) atom.erase(it);
}

void OmegaValuation::set_default_omega(PlaceId p) {
  auto it = std::lower_bound(atom.begin(), atom.end(), p,
                             [](const auto& row, PlaceId k) { return row.place < k; });
  if (it == atom.end() || it->place != p) it = atom.insert(it, PlaceData{p, false, {}});
  if (it->default_omega) return;
  it->default_omega = true;
  // Old explicit finites stay as exceptions; old implicit zeros become omega.
  std::erase_if(it->exceptions, [](const auto& e) { return e.second.is_omega(); });
}

bool OmegaValuation::add(const DataVector& effect) {
  for (const auto& [h, c] : effect.plain) {
    NatOmega next = at_plain(h).plus(c);
    if (next < NatOmega{0}) return false;
    set_plain(h, next);
  }
  for (const auto& [k, c] : effect.data) {
    NatOmega next = at(k.first, k.second).plus(c);
    if (next < NatOmega{0}) return false;
    set(k.first, k.second, next);
  }
  return true;
}

bool OmegaValuation::is_finite() const {
  for (const auto& [h, v] : plain)
    if (v.is_omega()) return false;
  for (const auto& row : atom) {
    if (row.default_omega) return false;
    for (const auto& [a, v] : row.exceptions)
      if (v.is_omega()) return false;
  }
  return true;
}

DataVector OmegaValuation::to_vector() const {
  if (!is_finite()) throw std::logic_error("omega valuation is not finite");
  DataVector out;
  for (const auto& [h, v] : plain) out.add_plain(h, v.v);
  for (const auto& row : atom)
    for (const auto& [a, v] : row.exceptions) out.add_data(row.place, a, v.v);
  return out;
}

NatOmega OmegaValuation::place_size(PlaceId p) const {
  const PlaceData* row = find_row(atom, p);
  if (!row) return NatOmega{0};
  if (row->default_omega) return NatOmega::omega();
  int64_t total = 0;
  for (const auto& [a, v] : row->exceptions) {
    if (v.is_omega()) return NatOmega::omega();
    if (v.v > 0) total += v.v;
  }
  return NatOmega::fin(total);
}

OmegaValuation OmegaValuation::renamed(const Renaming& r) const {
  OmegaValuation out = *this;
  for (auto& row : out.atom) {
    for (auto& [a, v] : row.exceptions) a = r(a);
    std::sort(row.exceptions.begin(), row.exceptions.end());
  }
  return out;
}

void OmegaValuation::collect_atoms(std::vector<Atom>& acc) const {
  for (const auto& row : atom)
    for (const auto& [a, v] : row.exceptions) acc.push_back(a);
}

void OmegaValuation::atom_signature(Atom a, AtomSignature& sig) const {
  for (const auto& row : atom)
    for (const auto& [b, v] : row.exceptions)
      if (b == a) {
        sig.push_back(row.place);
        sig.push_back(v.v);
      }
}

void OmegaValuation::prune() {
  std::erase_if(plain, [](const auto& p) { return p.second == NatOmega{0}; });
  std::sort(plain.begin(), plain.end());
  for (auto& row : atom) {
    NatOmega def = row.default_omega ? NatOmega::omega() : NatOmega{0};
    std::erase_if(row.exceptions, [&](const auto& e) { return e.second == def; });
    std::sort(row.exceptions.begin(), row.exceptions.end());
  }
  std::erase_if(atom,
                [](const PlaceData& r) { return !r.default_omega && r.exceptions.empty(); });
  std::sort(atom.begin(), atom.end(),
            [](const PlaceData& x, const PlaceData& y) { return x.place < y.place; });
}

}  // namespace birch
