#pragma once

#include "ddc2d/config.hpp"
#include "ddc2d/core.hpp"
#include "ddc2d/diagnostics.hpp"
#include "ddc2d/driver.hpp"
#include "ddc2d/elliptic.hpp"
#include "ddc2d/gstability.hpp"
#include "ddc2d/lifting.hpp"
#include "ddc2d/nonlinear.hpp"
#include "ddc2d/nse2d.hpp"
#include "ddc2d/random_ic.hpp"
#include "ddc2d/snapshot.hpp"
#include "ddc2d/stepper.hpp"
