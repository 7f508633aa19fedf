#pragma once

// Umbrella header for the Conway-Maxwell-Poisson toolkit.

#include "compoisson/characterizations.hpp"
#include "compoisson/com_transform.hpp"
#include "compoisson/distributions.hpp"
#include "compoisson/dpcp.hpp"
#include "compoisson/entropy_info.hpp"
#include "compoisson/errors.hpp"
#include "compoisson/json_io.hpp"
#include "compoisson/pmf.hpp"
#include "compoisson/queue_sim.hpp"
#include "compoisson/rng.hpp"
#include "compoisson/verify.hpp"
#include "compoisson/version.hpp"
