#pragma once

namespace setadam {

// Scalar type for all optimizer state. 64-bit by default; configure with
// SETADAM_SCALAR_F32 for qualitative 32-bit experiments.
#ifdef SETADAM_SCALAR_F32
using real = float;
#else
using real = double;
#endif

}  // namespace setadam
