#include "birch/atoms.hpp"

#include <stdexcept>

namespace birch {

Renaming Renaming::transposition(Atom a, Atom b) {
  if (a == b) return {};
  Renaming r;
  r.moved_ = {{std::min(a, b), std::max(a, b)}, {std::max(a, b), std::min(a, b)}};
  return r;
}

Renaming Renaming::from_pairs(std::vector<std::pair<Atom, Atom>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<Atom> domain, image;
  for (const auto& [from, to] : pairs) {
    domain.push_back(from);
    image.push_back(to);
  }
  for (size_t i = 1; i < domain.size(); ++i)
    if (domain[i] == domain[i - 1])
      throw std::invalid_argument("renaming: atom mapped twice");
  std::sort(image.begin(), image.end());
  for (size_t i = 1; i < image.size(); ++i)
    if (image[i] == image[i - 1])
      throw std::invalid_argument("renaming: not injective");

  // Complete to a permutation: images that are not themselves mapped anywhere
  // go back onto the unmatched domain atoms, in sorted order.
  std::vector<Atom> loose_image, loose_domain;
  std::ranges::set_difference(image, domain, std::back_inserter(loose_image));
  {
    std::vector<Atom> sorted_domain = domain;
    std::sort(sorted_domain.begin(), sorted_domain.end());
    std::vector<Atom> sorted_image = image;  // already sorted
    std::ranges::set_difference(sorted_domain, sorted_image,
                                std::back_inserter(loose_domain));
  }
  for (size_t i = 0; i < loose_image.size(); ++i)
    pairs.emplace_back(loose_image[i], loose_domain[i]);

  Renaming r;
  for (const auto& [from, to] : pairs)
    if (from != to) r.moved_.emplace_back(from, to);
  std::sort(r.moved_.begin(), r.moved_.end());
  return r;
}

Atom Renaming::operator()(Atom a) const {
  auto it = std::lower_bound(moved_.begin(), moved_.end(), a,
                             [](const auto& p, Atom x) { return p.first < x; });
  if (it != moved_.end() && it->first == a) return it->second;
  return a;
}

Renaming Renaming::then(const Renaming& g) const {
  std::vector<std::pair<Atom, Atom>> pairs;
  for (const auto& [from, to] : moved_) pairs.emplace_back(from, g(to));
  for (const auto& [from, to] : g.moved_)
    if ((*this)(from) == from)  // moved by g, untouched by *this
      pairs.emplace_back(from, to);
  return from_pairs(std::move(pairs));
}

Renaming Renaming::inverse() const {
  std::vector<std::pair<Atom, Atom>> pairs;
  for (const auto& [from, to] : moved_) pairs.emplace_back(to, from);
  return from_pairs(std::move(pairs));
}

Renaming canonical_renaming(std::vector<std::pair<AtomSignature, Atom>> atoms,
                            std::span<const Atom> pinned) {
  std::sort(atoms.begin(), atoms.end());
  std::vector<Atom> taken(pinned.begin(), pinned.end());
  std::sort(taken.begin(), taken.end());
  std::vector<std::pair<Atom, Atom>> pairs;
  uint32_t next = 0;
  for (const auto& [sig, atom] : atoms) {
    while (std::ranges::binary_search(taken, Atom{next})) ++next;
    pairs.emplace_back(atom, Atom{next});
    ++next;
  }
  return Renaming::from_pairs(std::move(pairs));
}

std::vector<Atom> fresh_atoms(std::span<const Atom> used, size_t count) {
  std::vector<Atom> sorted(used.begin(), used.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<Atom> out;
  uint32_t next = 0;
  while (out.size() < count) {
    while (std::ranges::binary_search(sorted, Atom{next})) ++next;
    out.push_back(Atom{next});
    ++next;
  }
  return out;
}

}  // namespace birch
