#pragma once

#include <array>
#include <string>
#include <vector>

#include "errors.hpp"

namespace mgate {

// Excitation sector of the probe and trigger branches.  K_p counts probe
// photons plus population of the probe-branch atomic levels {1,2}; K_t
// counts trigger photons plus population of the trigger-branch levels
// {4,5}.  Both are conserved by the Hamiltonian; decay can only lower or
// exchange them within the allowed set below.
struct Sector {
  int k_probe = 0;
  int k_trigger = 0;
  friend bool operator==(const Sector&, const Sector&) = default;
};

// One product state |r> (x) |n_p> (x) |n_t> of the effective single atom
// (level r in 1..5) and the two field modes.
struct BasisState {
  int level = 3;
  int n_probe = 0;
  int n_trigger = 0;
  friend bool operator==(const BasisState&, const BasisState&) = default;

  // Checked factory: only members of the canonical 18-state set may be made.
  static BasisState make(int level, int n_probe, int n_trigger);

  std::string str() const {
    return "(" + std::to_string(level) + "," + std::to_string(n_probe) + "," +
           std::to_string(n_trigger) + ")";
  }
};

inline Sector conserved_sector(const BasisState& s) {
  const int atom_p = (s.level == 1 || s.level == 2) ? 1 : 0;
  const int atom_t = (s.level == 4 || s.level == 5) ? 1 : 0;
  return Sector{s.n_probe + atom_p, s.n_trigger + atom_t};
}

// Sectors reachable from two-qubit photonic inputs (at most one photon per
// mode initially; cross decay 2->5 / 4->1 can convert one excitation).
inline bool sector_allowed(Sector s) {
  static constexpr std::array<Sector, 6> allowed = {
      Sector{0, 0}, Sector{1, 0}, Sector{0, 1},
      Sector{1, 1}, Sector{2, 0}, Sector{0, 2}};
  for (const Sector& a : allowed) {
    if (a == s) return true;
  }
  return false;
}

// The canonical 18-state basis: sectors in the order
// (0,0),(1,0),(0,1),(1,1),(2,0),(0,2), states within a sector by ascending
// atomic level.  Index 0 is the vacuum |3,0,0>.
class BasisSet {
 public:
  static constexpr int dim = 18;

  BasisSet() {
    static constexpr std::array<Sector, 6> order = {
        Sector{0, 0}, Sector{1, 0}, Sector{0, 1},
        Sector{1, 1}, Sector{2, 0}, Sector{0, 2}};
    for (const Sector& sec : order) {
      for (int r = 1; r <= 5; ++r) {
        for (int np = 0; np <= 2; ++np) {
          for (int nt = 0; nt <= 2; ++nt) {
            const BasisState s{r, np, nt};
            if (conserved_sector(s) == sec) states_.push_back(s);
          }
        }
      }
    }
  }

  const std::vector<BasisState>& states() const { return states_; }

  const BasisState& state(int i) const {
    if (i < 0 || i >= dim) throw params_error("basis index out of range");
    return states_[static_cast<std::size_t>(i)];
  }

  // Index of a state, or -1 if it is not a member.
  int find(const BasisState& s) const {
    for (int i = 0; i < dim; ++i) {
      if (states_[static_cast<std::size_t>(i)] == s) return i;
    }
    return -1;
  }

  int index(const BasisState& s) const {
    const int i = find(s);
    if (i < 0) throw params_error("state " + s.str() + " is not in the basis");
    return i;
  }

  // Index of the computational state |3, i_p, j_t>; qubit index q = 2*i + j.
  int qubit_index(int q) const {
    return index(BasisState{3, (q >> 1) & 1, q & 1});
  }

  static const BasisSet& canonical() {
    static const BasisSet basis;
    return basis;
  }

 private:
  std::vector<BasisState> states_;
};

inline BasisState BasisState::make(int level, int n_probe, int n_trigger) {
  const BasisState s{level, n_probe, n_trigger};
  if (level < 1 || level > 5 || n_probe < 0 || n_trigger < 0 ||
      !sector_allowed(conserved_sector(s)) ||
      BasisSet::canonical().find(s) < 0) {
    throw params_error("state " + s.str() +
                       " is outside the two-qubit reachable set");
  }
  return s;
}

inline BasisSet enumerate_basis() { return BasisSet(); }

}  // namespace mgate
