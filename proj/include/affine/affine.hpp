#pragma once

#include "affine/bh_sets.hpp"
#include "affine/cli.hpp"
#include "affine/errors.hpp"
#include "affine/linalg.hpp"
#include "affine/multiaffine.hpp"
#include "affine/recovery.hpp"
#include "affine/ring.hpp"
#include "affine/sharpness.hpp"
#include "affine/vonstaudt.hpp"
