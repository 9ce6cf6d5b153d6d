#pragma once

#include "sphflow/grid.hpp"
#include "sphflow/field.hpp"
#include "sphflow/spectral.hpp"
#include "sphflow/tensor.hpp"
#include "sphflow/flow.hpp"
#include "sphflow/identities.hpp"
#include "sphflow/io.hpp"
#include "sphflow/checks.hpp"
#include "sphflow/cli.hpp"
