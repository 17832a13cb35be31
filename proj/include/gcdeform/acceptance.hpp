#pragma once

// The acceptance suite: one exact pass/fail verdict per criterion.

#include <iosfwd>

namespace gcdef {

// Runs every acceptance criterion, printing one "pass"/"fail" line each, and
// returns true when all of them pass. `seed` drives the randomized property
// checks; any seed must pass.
bool run_acceptance(std::ostream& out, unsigned long seed = 12345);

}  // namespace gcdef
