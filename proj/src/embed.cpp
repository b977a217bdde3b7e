#include "birch/embed.hpp"

namespace birch {

namespace {

// Places mentioned by either valuation's atom rows.
std::vector<PlaceId> row_places(const OmegaValuation& a, const OmegaValuation& b) {
  std::vector<PlaceId> out;
  for (const auto& row : a.atom) out.push_back(row.place);
  for (const auto& row : b.atom) out.push_back(row.place);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool column_le(const OmegaValuation& lo, Atom a, const OmegaValuation& hi, Atom b,
               const std::vector<PlaceId>& places) {
  for (PlaceId p : places)
    if (!(lo.at(p, a) <= hi.at(p, b))) return false;
  return true;
}

bool column_le_default(const OmegaValuation& lo, Atom a, const OmegaValuation& hi,
                       const std::vector<PlaceId>& places) {
  for (PlaceId p : places)
    if (!(lo.at(p, a) <= hi.default_of(p))) return false;
  return true;
}

bool default_le_column(const OmegaValuation& lo, const OmegaValuation& hi, Atom b,
                       const std::vector<PlaceId>& places) {
  for (PlaceId p : places)
    if (!(lo.default_of(p) <= hi.at(p, b))) return false;
  return true;
}

}  // namespace

std::optional<Renaming> embeds(const OmegaConfiguration& lo,
                               const OmegaConfiguration& hi) {
  if (lo.state.location != hi.state.location) return std::nullopt;
  if (lo.state.regs.size() != hi.state.regs.size()) return std::nullopt;

  // Plain part and per-place defaults are rigid.
  {
    std::vector<PlaceId> hs;
    for (const auto& [h, v] : lo.valuation.plain) hs.push_back(h);
    for (const auto& [h, v] : hi.valuation.plain) hs.push_back(h);
    for (PlaceId h : hs)
      if (!(lo.valuation.at_plain(h) <= hi.valuation.at_plain(h))) return std::nullopt;
  }
  std::vector<PlaceId> places = row_places(lo.valuation, hi.valuation);
  for (PlaceId p : places)
    if (!(lo.valuation.default_of(p) <= hi.valuation.default_of(p)))
      return std::nullopt;

  // Registers force the renaming on the state's atoms.
  std::vector<std::pair<Atom, Atom>> forced;
  for (size_t r = 0; r < lo.state.regs.size(); ++r) {
    const auto &a = lo.state.regs[r], &b = hi.state.regs[r];
    if (a.has_value() != b.has_value()) return std::nullopt;
    if (a) forced.emplace_back(*a, *b);
  }
  std::sort(forced.begin(), forced.end());
  forced.erase(std::unique(forced.begin(), forced.end()), forced.end());
  for (size_t i = 1; i < forced.size(); ++i)
    if (forced[i].first == forced[i - 1].first) return std::nullopt;
  {
    std::vector<Atom> image;
    for (const auto& [a, b] : forced) image.push_back(b);
    std::sort(image.begin(), image.end());
    if (std::adjacent_find(image.begin(), image.end()) != image.end())
      return std::nullopt;
  }
  for (const auto& [a, b] : forced)
    if (!column_le(lo.valuation, a, hi.valuation, b, places)) return std::nullopt;

  auto in_forced_dom = [&](Atom a) {
    return std::ranges::any_of(forced, [&](const auto& p) { return p.first == a; });
  };
  auto in_forced_img = [&](Atom b) {
    return std::ranges::any_of(forced, [&](const auto& p) { return p.second == b; });
  };

  // Atoms of lo still to be placed, and named candidate targets in hi.
  std::vector<Atom> todo;
  for (Atom a : support(lo.valuation))
    if (!in_forced_dom(a)) todo.push_back(a);
  std::vector<Atom> named;
  for (Atom b : support(hi.valuation))
    if (!in_forced_img(b)) named.push_back(b);

  std::vector<Atom> fresh;
  {
    std::vector<Atom> avoid = support(lo);
    for (Atom b : support(hi)) avoid.push_back(b);
    fresh = fresh_atoms(avoid, todo.size());
  }

  std::vector<std::pair<Atom, Atom>> chosen = forced;
  std::vector<char> taken(named.size(), 0);

  // Depth-first matching; at a full assignment, unmatched named targets must
  // still dominate lo's default columns (they correspond to atoms lo only
  // constrains through its defaults).
  auto search = [&](auto&& self, size_t i, size_t fresh_used) -> std::optional<Renaming> {
    if (i == todo.size()) {
      for (size_t j = 0; j < named.size(); ++j)
        if (!taken[j] && !default_le_column(lo.valuation, hi.valuation, named[j], places))
          return std::nullopt;
      return Renaming::from_pairs(chosen);
    }
    Atom a = todo[i];
    for (size_t j = 0; j < named.size(); ++j) {
      if (taken[j]) continue;
      if (!column_le(lo.valuation, a, hi.valuation, named[j], places)) continue;
      taken[j] = 1;
      chosen.emplace_back(a, named[j]);
      if (auto r = self(self, i + 1, fresh_used)) return r;
      chosen.pop_back();
      taken[j] = 0;
    }
    if (column_le_default(lo.valuation, a, hi.valuation, places)) {
      chosen.emplace_back(a, fresh[fresh_used]);
      if (auto r = self(self, i + 1, fresh_used + 1)) return r;
      chosen.pop_back();
    }
    return std::nullopt;
  };
  return search(search, 0, 0);
}

std::optional<Renaming> embeds(const Configuration& lo, const OmegaConfiguration& hi) {
  return embeds(to_omega(lo), hi);
}

std::optional<Renaming> embeds(const Configuration& lo, const Configuration& hi) {
  return embeds(to_omega(lo), to_omega(hi));
}

}  // namespace birch
