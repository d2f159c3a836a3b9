#pragma once

#include "wiener/generate.hpp"
#include "wiener/io.hpp"
#include "wiener/lattice.hpp"
#include "wiener/muckenhoupt.hpp"
#include "wiener/norms.hpp"
#include "wiener/stability.hpp"
#include "wiener/toeplitz.hpp"
#include "wiener/weights.hpp"
#include "wiener/wiener.hpp"
