#pragma once

// Hyperfine dipole couplings and the four-level 87Rb D1 manifold.

#include <array>
#include <cmath>
#include <string>

#include "common.hpp"
#include "half_int.hpp"
#include "wigner.hpp"

namespace raman {

/// Basis order used everywhere: |1>, |2>, |1'>, |2'>.
enum class Level : int { g1 = 0, g2 = 1, e1 = 2, e2 = 3 };

inline constexpr std::array<Level, 4> kAllLevels{Level::g1, Level::g2, Level::e1, Level::e2};

constexpr int index_of(Level l) { return static_cast<int>(l); }
constexpr bool is_ground(Level l) { return l == Level::g1 || l == Level::g2; }

inline const char* label_of(Level l) {
  switch (l) {
    case Level::g1: return "1";
    case Level::g2: return "2";
    case Level::e1: return "1p";
    case Level::e2: return "2p";
  }
  return "?";
}

struct HyperfineLevel {
  Level label = Level::g1;
  HalfInt F;
  HalfInt mF;
  HalfInt j;
  double energy = 0.0;  // rad/ns
};

struct LevelSystem {
  std::array<HyperfineLevel, 4> levels;
  Eigen::Matrix4d dipole = Eigen::Matrix4d::Zero();  // symmetric, atomic units
  double delta1 = 0.0;                               // E(|2>) - E(|1>)
  double delta2 = 0.0;                               // E(|2'>) - E(|1'>)
  double muJ = 0.0;

  double mu(Level a, Level b) const { return dipole(index_of(a), index_of(b)); }
  double energy(Level l) const { return levels[static_cast<std::size_t>(index_of(l))].energy; }
  /// Transition angular frequency E(upper) - E(lower).
  double omega(Level upper, Level lower) const { return energy(upper) - energy(lower); }

  /// Throws ValidationError when an invariant is broken.
  void validate() const {
    require(dipole.isApprox(dipole.transpose(), 0.0), "dipole matrix must be symmetric");
    require(mu(Level::g1, Level::g2) == 0.0 && mu(Level::e1, Level::e2) == 0.0,
            "no direct ground-ground or excited-excited dipole coupling allowed");
    require(delta1 > 0.0 && delta2 > 0.0, "hyperfine splittings must be positive");
    for (const auto& lv : levels) {
      require(lv.mF.abs() <= lv.F, "|mF| must not exceed F");
    }
  }
};

/// Hyperfine transition dipole between |j I F mF> and |j' I F' mF'>:
///   muJ (-1)^(2F'+mF+j+I) sqrt((2F+1)(2F'+1)(2j+1)) (F' 1 F; mF' q -mF) {j j' 1; F' F I}
/// with q = mF - mF'. Forbidden transitions come out as exactly 0.
inline double hyperfine_dipole(HalfInt F, HalfInt mF, HalfInt Fp, HalfInt mFp, HalfInt j, HalfInt jp,
                               HalfInt I, double muJ) {
  const HalfInt q = mF - mFp;
  require(q.abs() <= HalfInt(1) && q.is_integer(), "q = mF - mF' must be -1, 0 or +1");
  const double three_j = wigner_3j(Fp, HalfInt(1), F, mFp, q, -mF);
  const double six_j = wigner_6j(j, jp, HalfInt(1), Fp, F, I);
  if (three_j == 0.0 || six_j == 0.0) return 0.0;
  const HalfInt exponent = Fp + Fp + mF + j + I;
  require(exponent.is_integer(), "hyperfine dipole phase exponent must be an integer");
  const double phase = detail::sign_of_power(std::abs(as_int(exponent)));
  const double degeneracy = (F.twice() + 1.0) * (Fp.twice() + 1.0) * (j.twice() + 1.0);
  return muJ * phase * std::sqrt(degeneracy) * three_j * six_j;
}

struct Rb87Parameters {
  double delta1_ghz = 6.8347;                     // 5S1/2 F=1 -> F=2
  double delta2_ghz = 0.8145;                     // 5P1/2 F'=1 -> F'=2
  double muJ = 2.9931;                            // 5S1/2 -> 5P1/2 reduced element, a.u.
  double optical_offset = two_pi * 2.0e5;         // surrogate E(|1'>) - E(|1>), rad/ns
};

/// Four-level 87Rb D1 manifold (F=1,2 ground; F'=1,2 excited) for one mF,
/// driven with linear polarization (Delta mF = 0).
inline LevelSystem build_rb87_system(HalfInt mF, const Rb87Parameters& p = {}) {
  require(mF.is_integer(), "87Rb hyperfine levels need integer mF, got " + mF.str());
  require(mF.abs() <= HalfInt(1),
          "mF=" + mF.str() + " is not contained in all four levels (F=1 and F'=1 need |mF|<=1)");
  require(mF != HalfInt(0),
          "mF=0 makes mu(1,1') and mu(2,2') vanish, so both Lambda paths degenerate; use mF=+1 or -1");
  require(p.optical_offset > ghz_to_rad_per_ns(p.delta1_ghz),
          "optical offset must exceed the ground splitting so both carriers stay positive");

  const HalfInt j = HalfInt::half(1);
  const HalfInt I = HalfInt::half(3);
  LevelSystem sys;
  sys.delta1 = ghz_to_rad_per_ns(p.delta1_ghz);
  sys.delta2 = ghz_to_rad_per_ns(p.delta2_ghz);
  sys.muJ = p.muJ;
  sys.levels = {HyperfineLevel{Level::g1, HalfInt(1), mF, j, 0.0},
                HyperfineLevel{Level::g2, HalfInt(2), mF, j, sys.delta1},
                HyperfineLevel{Level::e1, HalfInt(1), mF, j, p.optical_offset},
                HyperfineLevel{Level::e2, HalfInt(2), mF, j, p.optical_offset + sys.delta2}};
  for (Level g : {Level::g1, Level::g2}) {
    for (Level e : {Level::e1, Level::e2}) {
      const auto& lg = sys.levels[static_cast<std::size_t>(index_of(g))];
      const auto& le = sys.levels[static_cast<std::size_t>(index_of(e))];
      const double d = hyperfine_dipole(lg.F, lg.mF, le.F, le.mF, lg.j, le.j, I, p.muJ);
      sys.dipole(index_of(g), index_of(e)) = d;
      sys.dipole(index_of(e), index_of(g)) = d;
    }
  }
  sys.validate();
  return sys;
}

}  // namespace raman
