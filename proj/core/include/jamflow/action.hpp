#pragma once

#include <string>

namespace jamflow {

// One control decision of the adversary: either leave the system alone or
// jam a fraction of the sensor signals on a single segment. NoAttack is
// encoded as segment == -1 with fraction 0.
struct AttackAction {
  int segment = -1;      // 0-based target segment; -1 means no attack
  double fraction = 0.0; // fraction of signals suppressed, in (0, 1)

  static AttackAction no_attack() { return {}; }

  static AttackAction jam(int segment, double fraction);

  bool jams() const { return segment >= 0; }

  // Stable identifier used in CSV output: "no_attack" or "jam_s<k>_f<frac>"
  // with a 1-based segment number, e.g. "jam_s2_f0.25".
  std::string name() const;

  friend bool operator==(const AttackAction&, const AttackAction&) = default;
};

}  // namespace jamflow
