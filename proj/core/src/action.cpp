#include "jamflow/action.hpp"

#include <cstdio>
#include <stdexcept>

namespace jamflow {

AttackAction AttackAction::jam(int segment, double fraction) {
  if (segment < 0) throw std::invalid_argument("jam: segment must be >= 0");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("jam: fraction must lie in (0, 1)");
  AttackAction a;
  a.segment = segment;
  a.fraction = fraction;
  return a;
}

std::string AttackAction::name() const {
  if (!jams()) return "no_attack";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "jam_s%d_f%.2f", segment + 1, fraction);
  return buf;
}

}  // namespace jamflow
