#pragma once

#include <vector>

#include "ncomp/sfm.hpp"
#include "ncomp/sim.hpp"

namespace ncomp::fixtures {

// Six-packet conflict structure with the unique minimal cover
// {{P1,P4},{P2,P5},{P3,P6}} (indices 0-based in code).
inline ConflictMatrix example1_conflicts() {
  // upper triangle rows: P1 vs P2..P6, P2 vs P3..P6, ...
  std::vector<std::uint8_t> upper = {
      0, 0, 0, 1, 1,  // P1
      0, 1, 0, 1,     // P2
      1, 1, 0,        // P3
      1, 1,           // P4
      1,              // P5
  };
  return conflict_matrix_from_upper(6, std::move(upper));
}

// Five receivers, six packets; the worked demand matrix used across the
// ordering and delay fixtures.
inline StateFeedbackMatrix example3_sfm() {
  return sfm_from_rows({
      {1, 0, 0, 1, 1, 0},
      {1, 0, 0, 0, 0, 1},
      {1, 1, 0, 0, 0, 1},
      {1, 1, 0, 1, 0, 0},
      {0, 0, 1, 0, 0, 1},
  });
}

// Three receivers, three mutually conflicting packets.
inline StateFeedbackMatrix pairwise_conflict_sfm() {
  return sfm_from_rows({
      {1, 1, 0},
      {1, 0, 1},
      {0, 1, 1},
  });
}

// Fixed erasure pattern (X = erased) for the feedback-frequency comparison:
// semi-online needs 5 coded slots, fully-online needs 4.
inline ErasureSchedule feedback_comparison_schedule() {
  return ErasureSchedule::from_pattern({
      {1, 0, 0, 0, 0},
      {1, 0, 1, 0, 0},
      {0, 0, 0, 0, 0},
  });
}

}  // namespace ncomp::fixtures
