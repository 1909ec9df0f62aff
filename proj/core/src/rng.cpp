#include "episample/rng.hpp"

// Header-only; this TU exists so the library has a stable archive member
// for the module and a place for future out-of-line helpers.
