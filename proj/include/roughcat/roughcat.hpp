#pragma once

#include "conditions.hpp"
#include "errors.hpp"
#include "lemma_oracles.hpp"
#include "model_plane.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "shortseg.hpp"
#include "space_io.hpp"
#include "spaces.hpp"
