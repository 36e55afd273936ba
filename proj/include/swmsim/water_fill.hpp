#pragma once

#include "swmsim/model.hpp"

namespace swmsim {

// Which longest queues keep the leftover packets when the integer level
// leaves a remainder.
enum class RemainderOrder { LowestIdFirst, HighestIdFirst };

// Integral LQD push-out: keep min(v_i, l) with l the largest integer level
// fitting in `budget`, then hand the remainder out one packet per queue.
BufferState water_fill(const BufferState& virtual_state, Count budget,
                       RemainderOrder order = RemainderOrder::LowestIdFirst);

// Fractional LQD: exact rational level l with sum min(v_i, l) = budget.
FractionalBufferState water_fill(const FractionalBufferState& virtual_state, Count budget);

}  // namespace swmsim
