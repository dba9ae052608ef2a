#pragma once

#include "dampwave/assembly.hpp"
#include "dampwave/config.hpp"
#include "dampwave/energy.hpp"
#include "dampwave/errors.hpp"
#include "dampwave/mesh.hpp"
#include "dampwave/scheme.hpp"
#include "dampwave/solver.hpp"
#include "dampwave/sparse.hpp"
#include "dampwave/verification.hpp"
