#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "birch/embed.hpp"
#include "birch/net.hpp"
#include "birch/vectors.hpp"

namespace birch {

struct CoverCaps {
  size_t max_nodes = 50000;  // admitted tree nodes before giving up
  size_t max_depth = 10000;  // tree depth before giving up
};

// Finite union of simple ideals, as a canonical sorted antichain: no member
// embeds into another. When a resource cap is hit, `complete` is false, the
// diagnostic says why, and the ideals are only the part explored so far.
struct CoverResult {
  std::vector<OmegaConfiguration> ideals;
  bool complete = true;
  std::string diagnostic;
};

// Reduction of an arbitrary net to an equivalent single-location net with
// neither registers nor plain places, in three steps: registers move onto
// paired atom places (content and freshly-written content, reconciled by
// flash-back transitions), locations move onto plain places (a current-location
// token cycling through a shadow place so self-loops cannot cancel), and plain
// places lift to atom places by splitting counts over anonymous atoms. The
// index tables below drive the pull-back of cover ideals to the original net.
struct DvasReduction {
  Dvass reduced;

  // Step 1 (registers -> atom places). When the original net has no
  // registers, loc1 lists the original locations unchanged.
  struct Loc1 {
    LocId location = 0;   // original location
    uint32_t empty = 0;   // bitmask of EMPTY registers
    bool barred = false;  // mid-transition half
    friend auto operator<=>(const Loc1&, const Loc1&) = default;
  };
  std::vector<Loc1> loc1;
  size_t held_base = 0;  // atom place of register r's content: held_base + r
  size_t inc_base = 0;   // atom place of register r's incoming content
  size_t p1_count = 0;   // atom places after step 1
  size_t h1_count = 0;   // plain places after step 1 (the original ones)

  size_t loc1_index(LocId location, uint32_t empty, bool barred) const;
  // Step 2: plain place of the current-location token for loc1 index i.
  size_t loc_place(size_t i) const { return h1_count + 2 * i; }
  size_t loc_shadow_place(size_t i) const { return h1_count + 2 * i + 1; }
  // Step 3: atom place carrying the lifted tokens of plain place j.
  size_t lifted_place(size_t j) const { return p1_count + j; }

  // Steps that were identities are skipped; these report which ones ran.
  size_t reg_count() const { return inc_base - held_base; }
  size_t atom_count() const { return held_base; }  // original atom places
  bool step1() const { return reg_count() > 0; }
  bool step2() const { return loc1.size() > 1; }
  bool step3() const { return h1_count > 0 || step2(); }
};

DvasReduction to_dvas(const Dvass& net);

// Maps a configuration of the original net to the reduced net: register
// contents become held-place tokens, the location becomes a token on its
// plain place, and plain counts land on one fresh atom per lifted place.
Configuration reduce_configuration(const DvasReduction& red, const Configuration& c);

// Pulls cover ideals of the reduced net back to the original net, reversing
// the three steps: lifted places sum over their atoms into plain counts,
// location-token places select the control state, and register contents are
// drawn from the held places (named atoms with a token, or fresh atoms in all
// sharing patterns when the held place holds omega by default). The result is
// canonical but not yet an antichain.
std::vector<OmegaConfiguration> pull_back_cover(const DvasReduction& red,
                                                const std::vector<OmegaConfiguration>& ideals);

// Cover of the reachability set of c0, computed on the reduced net and pulled
// back. The ideal union of a complete result is exactly the downward closure
// of the reachable configurations, resource caps permitting.
CoverResult compute_cover(const Dvass& net, const Configuration& c0, const CoverCaps& caps = {});

// Same cover computed by running the tree on the original net directly,
// without the reduction; kept as the differential counterpart of the
// production path.
CoverResult compute_cover_direct(const Dvass& net, const Configuration& c0,
                                 const CoverCaps& caps = {});

bool ideal_member(const CoverResult& cover, const Configuration& c);

// Canonicalizes, sorts, and drops members embedding into other members.
std::vector<OmegaConfiguration> cover_antichain(std::vector<OmegaConfiguration> ideals);

}  // namespace birch
